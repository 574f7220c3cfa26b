#pragma once

#include <json.hpp>

#include <string>

#include "freewalk/freeprod.hpp"
#include "freewalk/singularity.hpp"
#include "freewalk/words.hpp"

namespace freewalk {

using json = nlohmann::json;

// {"dimension": d, "atoms": [{"x": [...], "w": "1/12" | 0.0833}], "label": s}
// Weights parse exactly: "p/q" as rationals, decimal strings and numbers via
// exact decimal expansion.
FactorMeasure factor_from_json(const json& doc);

// {"factor1": {...}, "factor2": {...}, "alpha": 0.25}
FreeProductConfig config_from_json(const json& doc);

json factor_to_json(const FactorMeasure& m);
json config_to_json(const FreeProductConfig& cfg);

// Flat record with the spec'd keys: theta, theta_bar, R, G_at_R, zeta1_at_R,
// zeta2_at_R, psi_at_theta_bar, classification, degenerate_along, I1, I2, J2,
// divergent, spr. Infinite values serialize as the string "inf".
json solution_to_json(const SpectralSolution& sol, const MomentReport& mr);

json mc_report_to_json(const McReport& rep);
json fit_report_to_json(const FitReport& rep);
json tauberian_to_json(const TauberianReport& rep);
json green_fit_to_json(const GreenSingularityFit& fit);
json second_order_to_json(const SecondOrderReport& rep);

// CSV emission (comma, '.' decimal, LF, header row); floats in shortest
// round-trip form so reruns are byte-identical.
std::string series_to_csv(const CoefficientSeries& c, const std::vector<double>& q_tilde);
std::string profile_to_csv(const SingularProfile& p);

// 64-bit config hash over the exact atom table and alpha, for embedding in
// artifacts.
std::string config_hash(const FreeProductConfig& cfg);
std::string factor_hash(const FactorMeasure& m);

}  // namespace freewalk
