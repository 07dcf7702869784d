#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fcns {

namespace schema {
inline const std::vector<std::string> profile = {"x", "v", "u", "w", "p"};
inline const std::vector<std::string> eps_profile = {"x", "v_eps", "u_eps", "w_eps", "p_eps"};
inline const std::vector<std::string> convergence = {
   "epsilon", "gamma", "sup_err_free", "x_min", "x_star", "transition_err", "fitted_exponent"};
inline const std::vector<std::string> energy = {
   "t",     "E0",   "E1",   "E2",   "D0",        "D1",        "D2",
   "X_norm", "L1_v", "L1_u", "L1_w", "sup_dev_v", "sup_dev_u", "min_v"};
inline const std::vector<std::string> state = {"x", "v", "u", "w"};
inline const std::vector<std::string> interface = {
   "t", "x_tilde", "x_tilde_prime", "p_s", "res_EDO1", "res_BCw", "res_transport", "res_EDO2"};
inline const std::vector<std::string> fb_state = {"x", "v_s", "u_s", "w_s"};
} // namespace schema

// 17 significant digits, locale independent.
std::string format_double(double x);

struct CsvTable
{
   std::vector<std::string> header;
   std::vector<std::vector<double>> rows;

   // Index of a column; throws std::invalid_argument naming a missing one.
   std::size_t column(const std::string& name) const;
   std::vector<double> column_values(const std::string& name) const;
};

// Throws std::invalid_argument when a row length differs from the header.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);
// Throws std::invalid_argument naming the first column of `expected` that is absent.
void check_schema(const CsvTable& table, const std::vector<std::string>& expected);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

// File name for a time-stamped snapshot, e.g. state_0.500000.csv.
std::string snapshot_name(const std::string& prefix, double t);

} // namespace fcns
