// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcns/experiments.hpp"
#include "fcns/scenarios.hpp"

using namespace fcns;
namespace fs = std::filesystem;

namespace {

const EndStates kBase{2.0, 1.0, 0.0, 1.0};

struct Outcome
{
   bool pass = false;
   std::string detail;
};

std::string fmt(const char* f, double a)
{
   char buf[64];
   std::snprintf(buf, sizeof buf, f, a);
   return buf;
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body)
{
   const auto t0 = std::chrono::steady_clock::now();
   Outcome o;
   try {
      o = body();
   } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
   }
   const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
   const bool in_time = limit_s <= 0.0 || secs < limit_s;
   if (!in_time)
      o.detail += "; over the runtime limit";
   const bool ok = o.pass && in_time;
   failures += ok ? 0 : 1;
   std::printf("%s criterion %d: %s: %s (%.2f s", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(),
               secs);
   if (limit_s > 0.0)
      std::printf(", limit %.0f s", limit_s);
   std::printf(")\n");
   std::fflush(stdout);
}

const std::vector<double> kEpsSweep{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

Outcome limit_profile()
{
   const LimitProfile lp(kBase);
   double err = std::abs(lp.speed() - 1.0);
   err = std::max(err, std::abs(lp.p_minus() - 1.0));
   err = std::max(err, std::abs(lp.v(0.0) - 1.0));
   for (int i = 1; i <= 2000; ++i) {
      const double x = 0.01 * i;
      err = std::max({err, std::abs(lp.w(x)), std::abs(lp.w(-x) - 1.0)});
   }
   // Residual of v' = (s/mu) v (v_plus - v) under central differences.
   auto residual = [&](double h) {
      double r = 0.0;
      for (double x = 0.5; x <= 8.0; x += 0.125)
         r = std::max(r, std::abs((lp.v(x + h) - lp.v(x - h)) / (2 * h) - lp.v(x) * (2.0 - lp.v(x))));
      return r;
   };
   const double order = std::log2(residual(0.02) / residual(0.01));
   return {err <= 1e-12 && order >= 1.9,
           "max identity error " + fmt("%.2e", err) + ", observed order " + fmt("%.3f", order)};
}

Outcome eps_profiles()
{
   double worst_res = 0.0, worst_gap = 0.0, worst_norm = 0.0, worst_time = 0.0;
   bool monotone = true;
   for (double gamma : {1.0, 2.0}) {
      for (double eps : kEpsSweep) {
         const auto t0 = std::chrono::steady_clock::now();
         const PressureLaw law(eps, gamma);
         const EpsProfile p = build_eps_profile(law, kBase);
         worst_res = std::max(worst_res, p.ode_residual());
         worst_gap = std::max({worst_gap, std::abs(p.v_samples().front() - p.v_minus()),
                               std::abs(p.v_samples().back() - p.v_plus())});
         const double target = 1.0 + std::pow(eps, 1.0 / (gamma + 1.0));
         worst_norm = std::max({worst_norm, std::abs(p.v_at_origin() - target),
                                std::abs(p.v(0.0) - target)});
         // Strict growth is carried by theta; tail samples of v round to the
         // end states in double precision.
         const auto& th = p.theta_samples();
         for (std::size_t i = 0; i < th.size(); ++i)
            if (!(p.dv_samples()[i] >= 0.0) || (i > 0 && !(th[i] > th[i - 1])))
               monotone = false;
         worst_time = std::max(
            worst_time, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
   }
   const bool ok = worst_res < 1e-8 && worst_gap < 1e-8 && worst_norm <= 1e-12 && monotone
                   && worst_time < 5.0;
   return {ok, "10 profiles, max residual " + fmt("%.2e", worst_res) + ", max end gap "
                  + fmt("%.2e", worst_gap) + ", normalization error " + fmt("%.1e", worst_norm)
                  + ", monotone " + (monotone ? "yes" : "no") + ", slowest "
                  + fmt("%.2f", worst_time) + " s"};
}

Outcome three_zone()
{
   bool ok = true;
   std::string detail;
   for (double gamma : {1.0, 2.0}) {
      const double target = 1.0 / (gamma + 1.0);
      std::vector<double> sup, xmin, quot;
      for (double eps : kEpsSweep) {
         const EndStates es = kBase;
         const EpsProfile p = build_eps_profile(PressureLaw(eps, gamma), es);
         const ZoneReport z =
            three_zone_diagnostics(p, LimitProfile(es, 1.0 / std::sqrt(es.v_plus - 1.0)));
         sup.push_back(z.sup_err_free);
         xmin.push_back(-z.x_min);
         quot.push_back(z.transition_err);
      }
      const double a_sup = fit_loglog_slope(kEpsSweep, sup);
      const double a_x = fit_loglog_slope(kEpsSweep, xmin);
      bool bounded = true;
      for (double q : quot)
         bounded = bounded && std::isfinite(q) && q <= 2.0 * quot.front();
      const bool sup_ok = std::abs(a_sup - target) <= 0.20 * target;
      const bool x_ok = std::abs(a_x - target) <= 0.25 * target;
      ok = ok && sup_ok && x_ok && bounded;
      double qmax = 0.0;
      for (double q : quot)
         qmax = std::max(qmax, q);
      detail += (detail.empty() ? "" : "; ") + std::string("gamma ") + fmt("%.0f", gamma)
                + ": sup exponent " + fmt("%.4f", a_sup) + (sup_ok ? "" : " (out of band)")
                + ", x_min exponent " + fmt("%.4f", a_x) + (x_ok ? "" : " (out of band)")
                + " vs " + fmt("%.4f", target) + ", transition quotient max "
                + fmt("%.2e", qmax) + (bounded ? "" : " (unbounded)");
   }
   return {ok, detail};
}

Outcome weight_identity()
{
   std::mt19937_64 rng(20240601);
   std::uniform_real_distribution<double> le(-8.0, -1.0), gm(1.0, 5.0), lv(-4.0, 1.0);
   double worst = 0.0;
   for (int i = 0; i < 1000; ++i) {
      const PressureLaw law(std::pow(10.0, le(rng)), gm(rng));
      const double v = 1.0 + std::pow(10.0, lv(rng));
      const auto [d1, d2] = law.derivatives(v);
      const double expected = (law.gamma + 1.0) / (law.gamma * law(v));
      worst = std::max(worst, std::abs(d2 / (d1 * d1) - expected) / expected);
   }
   return {worst <= 1e-12, "1000 samples, max relative error " + fmt("%.2e", worst)};
}

Outcome stability()
{
   const EpsProfile p = build_eps_profile(PressureLaw(1e-2, 1.0), kBase);
   const StabilityResult r = stability_experiment(p, StabilityParams{});
   std::string d = "gate lhs/rhs " + fmt("%.3f", r.gate.lhs / r.gate.rhs)
                   + ", decay " + fmt("%.4f", r.decay) + " (<= 0.2)"
                   + ", monotone after t = " + fmt("%.2f", r.transient) + ": "
                   + (r.monotone_ok ? "yes" : "no") + ", min v " + fmt("%.6f", r.min_v)
                   + ", X-norm ratio " + fmt("%.4f", r.x_norm_ratio) + " (<= 4, nondecreasing "
                   + (r.x_norm_ok ? "yes" : "no") + "), " + std::to_string(r.steps) + " steps";
   return {r.pass(), d};
}

Outcome linearization()
{
   const EpsProfile p = build_eps_profile(PressureLaw(1e-2, 1.0), kBase);
   const auto lv = linearization_study(p, LinearizationParams{});
   const double rv = lv[0].r_v / lv[1].r_v;
   const double rw = lv[0].r_w / lv[1].r_w;
   return {rv >= 3.0 && rw >= 3.0,
           "r_v " + fmt("%.3e", lv[0].r_v) + " -> " + fmt("%.3e", lv[1].r_v) + " (x"
              + fmt("%.2f", rv) + "), r_w " + fmt("%.3e", lv[0].r_w) + " -> "
              + fmt("%.3e", lv[1].r_w) + " (x" + fmt("%.2f", rw) + ")"};
}

Outcome free_boundary()
{
   const auto lv = fb_oracle_study(kBase, 12.0, 0.01, 1e-3, 2);
   bool ok = true;
   for (const auto& L : lv) {
      ok = ok && L.status == FBStatus::converged && L.iterations <= 10 && L.T == 0.5
           && L.x_err <= 0.02 && L.p_err <= 0.05 && L.min_v_interior > 1.0;
   }
   std::string d;
   for (std::size_t i = 0; i < lv.size(); ++i) {
      d += (i ? "; " : "") + std::string("h ") + fmt("%.3g", lv[i].h) + ": "
           + to_string(lv[i].status) + " in " + std::to_string(lv[i].iterations)
           + " iterations, x err " + fmt("%.2e", lv[i].x_err) + ", p err "
           + fmt("%.2e", lv[i].p_err) + ", min v " + fmt("%.4f", lv[i].min_v_interior);
   }
   if (!ok || lv.size() < 2)
      return {false, d};
   const auto& a = lv[0].identities;
   const auto& b = lv[1].identities;
   const std::pair<const char*, std::pair<double, double>> res[] = {
      {"transport", {a.max_transport, b.max_transport}},
      {"EDO-1", {a.max_edo1, b.max_edo1}},
      {"EDO-2", {a.max_edo2, b.max_edo2}},
      {"BC-w", {a.max_bcw, b.max_bcw}}};
   for (const auto& [name, v] : res) {
      const double ratio = v.first / v.second;
      ok = ok && ratio >= 3.0;
      d += std::string("; ") + name + " x" + fmt("%.2f", ratio);
   }
   return {ok, d};
}

Outcome hypotheses()
{
   bool ok = true;
   std::string d;
   for (double vp : {2.0, 3.0}) {
      const EndStates es{vp, 1.0, 0.0, 1.0};
      const LimitProfile lp(es);
      // Bracket from the closed-form derivatives at 0+ (u' = -s v').
      const double v1 = lp.dv(0.0), v2 = lp.d2v(0.0), u1 = -lp.speed() * v1, mu = es.mu;
      const double analytic = -u1 * u1 / v1 - mu * v1 * u1 + mu * v2;
      const double closed = 1.0 - lp.speed() * lp.speed();
      const double X = vp == 2.0 ? 12.0 : 20.0;
      const HypothesisReport r = validate_hypotheses(traveling_wave_data(es, X, 1 + 100 * static_cast<std::size_t>(X)));
      const double expected = vp == 2.0 ? 0.0 : 0.75;
      const double tol = vp == 2.0 ? 1e-6 : 1e-3;
      ok = ok && std::abs(r.h3_residual - expected) <= tol && std::abs(analytic - closed) <= 1e-12
           && std::abs(analytic - expected) <= 1e-12;
      d += (d.empty() ? "" : "; ") + std::string("v_plus ") + fmt("%.0f", vp) + ": numerical "
           + fmt("%.8f", r.h3_residual) + ", analytic " + fmt("%.8f", analytic);
   }
   return {ok, d};
}

std::map<std::string, std::string> run_once(const std::vector<std::string>& args, const fs::path& dir,
                                            int& code)
{
   std::vector<const char*> argv{"fcns"};
   for (const auto& a : args)
      argv.push_back(a.c_str());
   RunConfig cfg = parse_config(static_cast<int>(argv.size()), argv.data()).config;
   fs::remove_all(dir);
   fs::create_directories(dir);
   cfg.out_dir = dir;
   std::ostringstream log;
   code = run(cfg, log);
   std::map<std::string, std::string> files;
   for (const auto& e : fs::directory_iterator(dir)) {
      std::ifstream is(e.path(), std::ios::binary);
      files[e.path().filename().string()] = {std::istreambuf_iterator<char>(is), {}};
   }
   return files;
}

Outcome determinism()
{
   const std::vector<std::vector<std::string>> runs = {
      {"profile", "--v-plus", "2", "--u-minus", "1", "--u-plus", "0", "--mu", "1"},
      {"eps-profile", "--epsilon", "1e-2", "--gamma", "1"},
      {"converge", "--epsilons", "1e-2,1e-3,1e-4,1e-5", "--gamma", "1"},
      {"simulate", "--epsilon", "1e-2", "--seed", "7"},
      {"stability", "--epsilon", "1e-2"},
      {"free-boundary", "--oracle-tw", "--v-plus", "2"},
   };
   const fs::path root = fs::temp_directory_path() / "fcns_acceptance";
   bool ok = true;
   std::string d;
   for (const auto& args : runs) {
      int c1 = 0, c2 = 0;
      const auto a = run_once(args, root / args.front(), c1);
      const auto b = run_once(args, root / args.front(), c2);
      const bool same = a == b && c1 == c2 && !a.empty();
      ok = ok && same;
      d += (d.empty() ? "" : ", ") + args.front() + " " + std::to_string(a.size()) + " files exit "
           + std::to_string(c1) + (same ? " identical" : " DIFFERENT");
   }
   fs::remove_all(root);
   return {ok, d};
}

} // namespace

int main()
{
   criterion(1, "limit profile exactness", 1.0, limit_profile);
   criterion(2, "eps-profile correctness", 0.0, eps_profiles);
   criterion(3, "three-zone scaling", 120.0, three_zone);
   criterion(4, "weight identity", 1.0, weight_identity);
   criterion(5, "stability (finite horizon)", 120.0, stability);
   criterion(6, "linearization consistency", 120.0, linearization);
   criterion(7, "free-boundary oracle", 180.0, free_boundary);
   criterion(8, "hypothesis validator", 0.0, hypotheses);
   criterion(9, "determinism", 0.0, determinism);
   std::printf("%d of 9 criteria failed\n", failures);
   return failures == 0 ? 0 : 1;
}
