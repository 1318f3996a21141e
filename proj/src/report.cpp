#include "superhedge/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace superhedge {

namespace {

using nlohmann::json;

const char* status_name(PricingStatus s) {
  switch (s) {
    case PricingStatus::priced:
      return "priced";
    case PricingStatus::primal_unbounded_below:
      return "primal_unbounded_below";
    case PricingStatus::error:
      return "error";
  }
  return "error";
}

json certificate_json(const PricingProblem& p, const PrimalCertificate& cert) {
  json statics = json::array();
  for (const auto& s : cert.statics)
    statics.push_back({{"time", s.time},
                       {"asset", s.asset},
                       {"strike", s.strike},
                       {"coefficient", s.coefficient}});
  json options = json::array();
  for (std::size_t i = 0; i < cert.eta.size(); ++i)
    options.push_back({{"id", p.options[i].id}, {"eta", cert.eta[i]}});
  json strategy = json::array();
  for (const auto& sn : cert.strategy) {
    json entry = {{"time", sn.time}, {"node", sn.node}, {"delta", sn.delta}};
    if (!sn.lambda.empty()) entry["lambda"] = sn.lambda;
    if (!sn.rho.empty()) entry["rho"] = sn.rho;
    strategy.push_back(std::move(entry));
  }
  return {{"cash", cert.cash},
          {"statics", std::move(statics)},
          {"options", std::move(options)},
          {"strategy", std::move(strategy)}};
}

json measure_json(const PathLattice& lattice, const std::vector<double>& w) {
  json m = json::object();
  for (long long path = 0; path < static_cast<long long>(w.size()); ++path)
    if (w[path] > 1e-15) m[path_key(lattice, path)] = w[path];
  return m;
}

}  // namespace

std::string path_key(const PathLattice& lattice, long long path) {
  const auto coords = lattice.path_coords(path);
  std::ostringstream os;
  for (int t = 0; t < lattice.periods(); ++t) {
    os << '(';
    for (int n = 0; n < lattice.assets(); ++n) {
      if (n) os << ',';
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g",
                    coords[static_cast<std::size_t>(t) * lattice.assets() + n]);
      os << buf;
    }
    os << ')';
  }
  return os.str();
}

std::string report_json(const PricingReport& rep, const PricingProblem& p) {
  json j;
  j["status"] = status_name(rep.status);
  j["primal"] = rep.primal_value;
  j["dual"] = rep.dual_value;
  j["gap"] = rep.gap;
  j["min_margin"] = rep.min_margin;
  j["non_approximable"] = rep.non_approximable;
  if (!rep.message.empty()) j["message"] = rep.message;
  if (rep.status == PricingStatus::priced) {
    j["certificate"] = certificate_json(p, rep.primal);
    j["dual_measure"] = measure_json(p.lattice, rep.dual.path_weights);
    j["node_penalties"] = rep.dual.node_penalties;
    j["option_conjugates"] = rep.dual.option_conjugates;
  }
  j["iterations"] = {{"primal", rep.primal_iterations},
                     {"dual", rep.dual_iterations}};
  return j.dump(2);
}

std::string report_json(const FtapReport& rep, const PricingProblem& p) {
  json j;
  j["verdict"] =
      rep.verdict == FtapVerdict::no_arbitrage ? "no_arbitrage" : "arbitrage";
  if (rep.verdict == FtapVerdict::no_arbitrage) {
    j["witness"] = measure_json(p.lattice, rep.witness.weights);
    j["witness_penalty"] = rep.witness_penalty;
  } else {
    j["certificate"] = certificate_json(p, rep.certificate);
    j["margin"] = rep.margin;
    j["optimal_profit"] = std::isfinite(rep.optimal_profit)
                              ? json(rep.optimal_profit)
                              : json("infinite");
    j["violated_rows"] = rep.violated_row_kinds;
  }
  return j.dump(2);
}

std::string report_json(const OapResult& rep) {
  json j;
  switch (rep.classification) {
    case OapResult::Profit::none:
      j["classification"] = "none";
      break;
    case OapResult::Profit::finite:
      j["classification"] = "finite";
      break;
    case OapResult::Profit::infinite:
      j["classification"] = "infinite";
      break;
  }
  j["value"] = std::isfinite(rep.value) ? json(rep.value) : json("infinite");
  return j.dump(2);
}

void report_text(std::ostream& os, const PricingReport& rep,
                 const PricingProblem& p) {
  os << "status: " << status_name(rep.status) << "\n";
  if (rep.status != PricingStatus::priced) {
    if (!rep.message.empty()) os << "note: " << rep.message << "\n";
    return;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "price: %.10g   (dual %.10g, gap %.2e, margin %.2e)\n",
                rep.primal_value, rep.dual_value, rep.gap, rep.min_margin);
  os << buf;
  if (rep.non_approximable)
    os << "warning: constraint family declared non-approximable; lattice "
          "values may differ from continuum values\n";
  os << "certificate: cash " << rep.primal.cash << ", "
     << rep.primal.statics.size() << " static call position(s)";
  for (std::size_t i = 0; i < rep.primal.eta.size(); ++i)
    os << ", eta[" << p.options[i].id << "] = " << rep.primal.eta[i];
  os << "\n";
  os << "dual measure: " << [&] {
    int n = 0;
    for (double w : rep.dual.path_weights)
      if (w > 1e-15) ++n;
    return n;
  }() << " path(s) with positive weight\n";
}

void report_text(std::ostream& os, const FtapReport& rep,
                 const PricingProblem& p) {
  if (rep.verdict == FtapVerdict::no_arbitrage) {
    os << "verdict: no_arbitrage\n";
    os << "witness penalty: " << rep.witness_penalty << "\n";
    int n = 0;
    for (double w : rep.witness.weights)
      if (w > 1e-15) ++n;
    os << "witness support: " << n << " path(s)\n";
    return;
  }
  os << "verdict: arbitrage\n";
  if (std::isfinite(rep.optimal_profit))
    os << "optimal profit: " << rep.optimal_profit << "\n";
  else
    os << "optimal profit: infinite\n";
  os << "certificate margin: " << rep.margin << " on every lattice path\n";
  os << "certificate: cash " << rep.certificate.cash << ", "
     << rep.certificate.statics.size() << " static call position(s)";
  for (std::size_t i = 0; i < rep.certificate.eta.size(); ++i)
    os << ", eta[" << p.options[i].id << "] = " << rep.certificate.eta[i];
  os << "\n";
  if (!rep.violated_row_kinds.empty()) {
    os << "infeasibility attribution:";
    for (const auto& k : rep.violated_row_kinds) os << ' ' << k;
    os << "\n";
  }
}

void report_text(std::ostream& os, const OapResult& rep) {
  switch (rep.classification) {
    case OapResult::Profit::none:
      os << "optimal arbitrage profit: 0 (no arbitrage)\n";
      break;
    case OapResult::Profit::finite:
      os << "optimal arbitrage profit: " << rep.value << " (finite)\n";
      break;
    case OapResult::Profit::infinite:
      os << "optimal arbitrage profit: infinite\n";
      break;
  }
}

}  // namespace superhedge
