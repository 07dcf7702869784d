#include "fcns/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fcns {

std::string format_double(double x)
{
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.17g", x);
   return buf;
}

std::size_t CsvTable::column(const std::string& name) const
{
   for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name)
         return i;
   throw std::invalid_argument("missing column '" + name + "'");
}

std::vector<double> CsvTable::column_values(const std::string& name) const
{
   const std::size_t j = column(name);
   std::vector<double> out;
   out.reserve(rows.size());
   for (const auto& r : rows)
      out.push_back(r.at(j));
   return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
   std::ofstream os(path, std::ios::binary);
   if (!os)
      throw std::runtime_error("cannot open " + path.string() + " for writing");
   for (std::size_t i = 0; i < table.header.size(); ++i)
      os << (i ? "," : "") << table.header[i];
   os << '\n';
   for (const auto& row : table.rows) {
      if (row.size() != table.header.size())
         throw std::invalid_argument("csv row length does not match the header");
      for (std::size_t i = 0; i < row.size(); ++i)
         os << (i ? "," : "") << format_double(row[i]);
      os << '\n';
   }
   if (!os)
      throw std::runtime_error("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path)
{
   std::ifstream is(path);
   if (!is)
      throw std::runtime_error("cannot open " + path.string());
   CsvTable t;
   std::string line;
   if (!std::getline(is, line) || line.empty())
      throw std::invalid_argument(path.string() + ": empty csv (no header)");
   {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ','))
         t.header.push_back(cell);
   }
   while (std::getline(is, line)) {
      if (line.empty())
         continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<double> row;
      while (std::getline(ss, cell, ','))
         row.push_back(std::stod(cell));
      if (row.size() != t.header.size())
         throw std::invalid_argument(path.string() + ": ragged row");
      t.rows.push_back(std::move(row));
   }
   return t;
}

void check_schema(const CsvTable& table, const std::vector<std::string>& expected)
{
   for (const auto& name : expected)
      table.column(name);
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j)
{
   std::ofstream os(path, std::ios::binary);
   if (!os)
      throw std::runtime_error("cannot open " + path.string() + " for writing");
   os << j.dump(2) << '\n';
}

std::string snapshot_name(const std::string& prefix, double t)
{
   char buf[64];
   std::snprintf(buf, sizeof buf, "%s_%.6f.csv", prefix.c_str(), t);
   return buf;
}

} // namespace fcns
