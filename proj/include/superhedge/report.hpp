#pragma once

#include <iosfwd>
#include <string>

#include "superhedge/arbitrage.hpp"
#include "superhedge/pricing.hpp"

namespace superhedge {

// Stable machine-readable documents; field names are part of the interface.
std::string report_json(const PricingReport& rep, const PricingProblem& p);
std::string report_json(const FtapReport& rep, const PricingProblem& p);
std::string report_json(const OapResult& rep);

void report_text(std::ostream& os, const PricingReport& rep,
                 const PricingProblem& p);
void report_text(std::ostream& os, const FtapReport& rep,
                 const PricingProblem& p);
void report_text(std::ostream& os, const OapResult& rep);

// canonical path label "(x1,..)(x2,..)" used as the dual-measure key
std::string path_key(const PathLattice& lattice, long long path);

}  // namespace superhedge
