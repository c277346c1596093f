#include "gridrules/sampling.hpp"

#include <cmath>

#include "gridrules/common.hpp"
#include "gridrules/mathfn.hpp"

namespace gridrules {

namespace {

CapacityFactorConfig cf_from_json(const nlohmann::json& j, CapacityFactorConfig base) {
  if (j.contains("alpha")) base.alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) base.beta = j.at("beta").get<double>();
  if (j.contains("fixed")) base.fixed = j.at("fixed").get<double>();
  return base;
}

nlohmann::json cf_to_json(const CapacityFactorConfig& c) {
  nlohmann::json j{{"alpha", c.alpha}, {"beta", c.beta}};
  if (c.fixed >= 0.0) j["fixed"] = c.fixed;
  return j;
}

// Cholesky factor of the equicorrelation matrix (1 on the diagonal, rho off it).
Eigen::MatrixXd equicorr_chol(int n, double rho) {
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, rho);
  c.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::InvalidArgument, "correlation " + std::to_string(rho) + " is not positive definite for " +
                                         std::to_string(n) + " sites");
  return llt.matrixL();
}

}  // namespace

SamplerConfig SamplerConfig::from_json(const nlohmann::json& j) {
  SamplerConfig c;
  if (j.contains("load")) {
    const auto& jl = j.at("load");
    c.load_rel_std = jl.value("rel_std", c.load_rel_std);
    c.load_min_factor = jl.value("min_factor", c.load_min_factor);
    c.load_max_factor = jl.value("max_factor", c.load_max_factor);
    c.load_corr = jl.value("corr", c.load_corr);
  }
  if (j.contains("wind")) c.wind = cf_from_json(j.at("wind"), c.wind);
  if (j.contains("pv")) c.pv = cf_from_json(j.at("pv"), c.pv);
  c.renewable_corr = j.value("renewable_corr", c.renewable_corr);
  c.validate();
  return c;
}

nlohmann::json SamplerConfig::to_json() const {
  return nlohmann::json{{"load",
                         {{"rel_std", load_rel_std},
                          {"min_factor", load_min_factor},
                          {"max_factor", load_max_factor},
                          {"corr", load_corr}}},
                        {"wind", cf_to_json(wind)},
                        {"pv", cf_to_json(pv)},
                        {"renewable_corr", renewable_corr}};
}

void SamplerConfig::validate() const {
  if (load_rel_std < 0.0) fail(ErrorCode::InvalidArgument, "sampler: load rel_std must be >= 0");
  if (load_min_factor < 0.0 || load_max_factor <= load_min_factor)
    fail(ErrorCode::InvalidArgument, "sampler: need 0 <= min_factor < max_factor");
  for (const CapacityFactorConfig* c : {&wind, &pv}) {
    if (c->fixed >= 0.0) {
      if (c->fixed > 1.0) fail(ErrorCode::InvalidArgument, "sampler: fixed capacity factor must be in [0,1]");
    } else if (!(c->alpha > 0.0) || !(c->beta > 0.0)) {
      fail(ErrorCode::InvalidArgument, "sampler: Beta shape parameters must be positive");
    }
  }
  for (double rho : {renewable_corr, load_corr})
    if (rho < 0.0 || rho >= 1.0) fail(ErrorCode::InvalidArgument, "sampler: correlations must lie in [0,1)");
}

ScenarioSampler::ScenarioSampler(const GridSpec& spec, const SamplerConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  for (int gi : spec.renewable_gens()) ren_kinds_.push_back(spec.generators[gi].kind);
  ren_capacity_ = spec.renewable_capacities();
  load_nominal_ = spec.nominal_loads();
  chol_ren_ = equicorr_chol(static_cast<int>(ren_kinds_.size()), cfg_.renewable_corr);
  chol_load_ = equicorr_chol(static_cast<int>(load_nominal_.size()), cfg_.load_corr);
}

std::vector<Scenario> ScenarioSampler::sample(int n, std::uint64_t seed) const {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sampler: n must be >= 1");
  const int nr = static_cast<int>(ren_kinds_.size());
  const int nd = static_cast<int>(load_nominal_.size());
  Rng rng(seed);
  std::vector<Scenario> out;
  out.reserve(n);
  Eigen::VectorXd eta_r(nr), eta_d(nd);
  for (int s = 0; s < n; ++s) {
    Scenario sc;
    sc.renewable_mw.resize(nr);
    sc.load_mw.resize(nd);

    for (int i = 0; i < nr; ++i) eta_r(i) = normal_ppf(rng.uniform01());
    Eigen::VectorXd z = chol_ren_ * eta_r;
    for (int i = 0; i < nr; ++i) {
      const CapacityFactorConfig& c = ren_kinds_[i] == GenKind::Wind ? cfg_.wind : cfg_.pv;
      double cf = c.fixed >= 0.0 ? c.fixed : beta_ppf(normal_cdf(z(i)), c.alpha, c.beta);
      sc.renewable_mw(i) = cf * ren_capacity_(i);
    }

    for (int i = 0; i < nd; ++i) eta_d(i) = normal_ppf(rng.uniform01());
    Eigen::VectorXd zd = chol_load_ * eta_d;
    for (int i = 0; i < nd; ++i) {
      double nominal = load_nominal_(i);
      sc.load_mw(i) = trunc_normal_ppf(normal_cdf(zd(i)), nominal, cfg_.load_rel_std * nominal,
                                       cfg_.load_min_factor * nominal, cfg_.load_max_factor * nominal);
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace gridrules
