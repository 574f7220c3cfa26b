#include "freewalk/json_io.hpp"

#include <cmath>
#include <sstream>

#include "freewalk/errors.hpp"
#include "freewalk/util.hpp"

namespace freewalk {

namespace {

mpq_class parse_weight(const json& w) {
  if (w.is_number_integer()) return mpq_class(w.get<long>());
  if (w.is_number_float()) return mpq_class(w.get<double>());  // exact binary
  if (w.is_string()) {
    const std::string s = w.get<std::string>();
    if (s.find('/') != std::string::npos) {
      mpq_class q;
      if (q.set_str(s, 10) != 0)
        raise(errc::bad_config, "cannot parse rational weight '" + s + "'");
      q.canonicalize();
      return q;
    }
    // exact decimal expansion: sign, integer part, fraction part
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
      neg = t[0] == '-';
      t.erase(0, 1);
    }
    const auto dot = t.find('.');
    std::string digits = t;
    size_t frac = 0;
    if (dot != std::string::npos) {
      frac = t.size() - dot - 1;
      digits = t.substr(0, dot) + t.substr(dot + 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      raise(errc::bad_config, "cannot parse decimal weight '" + s + "'");
    mpz_class num(digits, 10);
    mpz_class den = 1;
    for (size_t i = 0; i < frac; ++i) den *= 10;
    mpq_class q(num, den);
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
  }
  raise(errc::bad_config, "weight must be a number or string");
}

json extended_to_json(const Extended& e) {
  if (!e.finite) return json("inf");
  return json(e.v);
}

}  // namespace

FactorMeasure factor_from_json(const json& doc) {
  if (!doc.is_object()) raise(errc::bad_config, "factor document must be an object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "dimension" && key != "atoms" && key != "label")
      raise(errc::bad_config, "unknown key '" + key + "' in factor document");
  }
  RawMeasure raw;
  raw.dimension = doc.at("dimension").get<int>();
  raw.label = doc.value("label", std::string{});
  for (const json& aj : doc.at("atoms")) {
    for (const auto& [key, value] : aj.items()) {
      (void)value;
      if (key != "x" && key != "w")
        raise(errc::bad_config, "unknown key '" + key + "' in atom");
    }
    Atom a;
    a.x = aj.at("x").get<std::vector<int>>();
    a.w = parse_weight(aj.at("w"));
    a.wd = a.w.get_d();
    raw.atoms.push_back(std::move(a));
  }
  return validate_factor(raw);
}

FreeProductConfig config_from_json(const json& doc) {
  if (!doc.is_object()) raise(errc::bad_config, "config document must be an object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "factor1" && key != "factor2" && key != "alpha")
      raise(errc::bad_config, "unknown key '" + key + "' in config document");
  }
  FreeProductConfig cfg;
  cfg.factor1 = factor_from_json(doc.at("factor1"));
  cfg.factor2 = factor_from_json(doc.at("factor2"));
  cfg.alpha = doc.at("alpha").get<double>();
  return cfg;
}

json factor_to_json(const FactorMeasure& m) {
  json atoms = json::array();
  for (const Atom& a : m.atoms) {
    json aj;
    aj["x"] = a.x;
    aj["w"] = a.w.get_str();
    atoms.push_back(aj);
  }
  return json{{"dimension", m.dim}, {"atoms", atoms}, {"label", m.label}};
}

json config_to_json(const FreeProductConfig& cfg) {
  return json{{"factor1", factor_to_json(cfg.factor1)},
              {"factor2", factor_to_json(cfg.factor2)},
              {"alpha", cfg.alpha}};
}

json solution_to_json(const SpectralSolution& sol, const MomentReport& mr) {
  json j;
  j["theta"] = sol.theta;
  j["theta_bar"] = sol.theta_bar;
  j["R"] = sol.R;
  j["G_at_R"] = sol.G_at_R;
  j["zeta1_at_R"] = sol.zeta1_at_R;
  j["zeta2_at_R"] = sol.zeta2_at_R;
  j["psi_at_theta_bar"] = sol.psi_at_theta_bar;
  j["classification"] = to_string(sol.classification);
  j["degenerate_along"] = sol.degenerate_along;
  j["I1"] = extended_to_json(mr.I1);
  j["I2"] = extended_to_json(mr.I2);
  j["J2"] = extended_to_json(mr.J2);
  j["divergent"] = mr.divergent;
  j["spr"] = mr.spectrally_positive_recurrent;
  return j;
}

json mc_report_to_json(const McReport& rep) {
  return json{{"n", rep.n},
              {"trials", rep.trials},
              {"seed", rep.seed},
              {"estimate", rep.estimate},
              {"stderr", rep.stderr_est}};
}

json fit_report_to_json(const FitReport& rep) {
  return json{{"model", rep.model},       {"exponent_a", rep.exponent_a},
              {"exponent_b", rep.exponent_b}, {"constant", rep.constant},
              {"residual", rep.residual}, {"drift", rep.drift},
              {"pass", rep.pass},         {"detail", rep.detail}};
}

json tauberian_to_json(const TauberianReport& rep) {
  return json{{"fixed_b0", fit_report_to_json(rep.fixed_b0)},
              {"fixed_bhalf", fit_report_to_json(rep.fixed_bhalf)},
              {"free", fit_report_to_json(rep.free_fit)},
              {"preferred", rep.preferred},
              {"window_stable", rep.window_stable}};
}

json green_fit_to_json(const GreenSingularityFit& fit) {
  json models = json::array();
  for (const auto& m : fit.models) models.push_back(fit_report_to_json(m));
  return json{{"models", models},
              {"best_model", fit.best_model},
              {"free_exponent", fit.free_exponent},
              {"residual_ratio_second_to_best", fit.residual_ratio_second_to_best}};
}

json second_order_to_json(const SecondOrderReport& rep) {
  return json{{"second_derivative_law", fit_report_to_json(rep.second_derivative_law)},
              {"derivative_ratio_law", fit_report_to_json(rep.derivative_ratio_law)},
              {"c1_closed", rep.c1_closed},
              {"c2_closed", rep.c2_closed},
              {"Cprime_closed", rep.Cprime_closed}};
}

std::string series_to_csv(const CoefficientSeries& c, const std::vector<double>& q_tilde) {
  std::string out = "n,c_n,q_tilde_n\n";
  for (size_t n = 0; n < c.c.size(); ++n) {
    out += std::to_string(n);
    out += ',';
    out += format_double(c.c[n]);
    out += ',';
    out += n < q_tilde.size() ? format_double(q_tilde[n]) : std::string("");
    out += '\n';
  }
  return out;
}

std::string profile_to_csv(const SingularProfile& p) {
  std::string out =
      "k,r,gap,G,dG,d2G,G_gap,zeta1,zeta2,one_minus_zeta2,i1_2,i1_G2,i2_2,g2z,dg2z\n";
  for (const ProfileRow& row : p.rows) {
    out += std::to_string(row.k);
    for (double v : {row.r, row.gap, row.G, row.dG, row.d2G, row.G_gap, row.zeta1,
                     row.zeta2, row.one_minus_zeta2, row.i1_2, row.i1_G2, row.i2_2,
                     row.g2z, row.dg2z}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string factor_hash(const FactorMeasure& m) { return hex64(m.hash()); }

std::string config_hash(const FreeProductConfig& cfg) {
  std::string blob = factor_hash(cfg.factor1) + "*" + factor_hash(cfg.factor2) + "@";
  blob += format_double(cfg.alpha);
  return hex64(fnv1a64(blob));
}

}  // namespace freewalk
