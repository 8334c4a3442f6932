#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "hopt/dual_ridge.hpp"
#include "hopt/error.hpp"
#include "hopt/experiments.hpp"
#include "hopt/glm.hpp"
#include "hopt/kernels.hpp"
#include "hopt/parallel.hpp"
#include "hopt/primal_ridge.hpp"
#include "hopt/rcdm.hpp"
#include "hopt/spectral.hpp"
#include "output.hpp"

namespace hopt {
namespace {

namespace fs = std::filesystem;

struct Context {
  const ExperimentConfig& cfg;
  std::ostream& log;
  fs::path dir;
  std::vector<EmittedFile> files;
  std::size_t workers = 0;
  bool numerical_ok = true;

  void emit(const std::string& name, const std::string& content) {
    files.push_back(detail::write_output(dir, name, content));
    log << "  wrote " << name << '\n';
  }
};

std::string num(double v) { return format_number(v); }

Vector log_grid(double lo, double hi, std::size_t k) {
  Vector g(k);
  if (k == 1) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < k; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1));
  return g;
}

/// Grid [lo, hi], widened upward when the admissible range collapses.
Vector zeta_grid(double lo, double hi, std::size_t k) {
  lo = std::max(lo, 1e-300);
  if (!(hi > lo)) hi = 10.0 * lo;
  return log_grid(lo, hi, k);
}

std::vector<std::size_t> report_times(std::size_t steps) {
  std::vector<std::size_t> out;
  for (std::size_t t : {0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000})
    if (t <= steps) out.push_back(t);
  if (out.back() != steps) out.push_back(steps);
  return out;
}

StepRule parse_step_rule(const std::string& s) {
  if (s == "diagonal") return StepRule::Diagonal;
  if (s == "theoretical") return StepRule::Theoretical;
  throw Error(ErrorKind::ConfigError, "step_rule must be diagonal or theoretical");
}

Sampling parse_sampling(const std::string& s) {
  if (s == "permutation") return Sampling::Permutation;
  if (s == "iid") return Sampling::IidUniform;
  throw Error(ErrorKind::ConfigError, "sampling must be permutation or iid");
}

SplitDatasets load_split(const ExperimentConfig& cfg) {
  const double frac = cfg.get_double("train_fraction");
  const std::uint64_t seed = cfg.get_u64("split_seed");
  if (cfg.get("dataset") == "synthetic") {
    const Dataset full = generate_synthetic(synthetic_spec(cfg));
    return split_dense(full.x, full.y, seed, frac);
  }
  const RawDataset raw = read_libsvm_file(cfg.get("dataset"));
  if (raw.rows.empty()) throw Error(ErrorKind::ConfigError, "dataset has no rows");
  return preprocess(raw, seed, frac);
}

std::size_t epochs_to_reach(const OptimizerTrace& trace, double threshold) {
  for (const auto& r : trace.steps)
    if (r.subopt <= threshold) return r.epoch;
  return std::numeric_limits<std::size_t>::max();
}

std::string epochs_text(std::size_t e) {
  return e == std::numeric_limits<std::size_t>::max() ? "inf" : std::to_string(e);
}

// --- tau-profile -------------------------------------------------------------

void run_tau_profile(Context& ctx) {
  const Dataset data = load_dataset(ctx.cfg);
  const double mu = ctx.cfg.mu();
  std::ostringstream summary;
  summary << "variant,n,d,rank,tau,argmax,rho2_sum,response_second_moment,bessel_holds,degenerate_response\n";
  for (const auto& [variant, ds] : {std::pair<std::string, Dataset>{"centered", data},
                                    std::pair<std::string, Dataset>{"scaled", scale_features(data)}}) {
    const SpectralDecomposition spec = decompose(ds, mu);
    const TauProfile profile = measure_tau(spec);
    std::ostringstream scatter;
    write_scatter_csv(scatter, export_scatter(profile));
    ctx.emit("scatter_" + variant + ".csv", scatter.str());
    const bool bessel = profile.rho2_sum() <= spec.response_second_moment * (1.0 + 1e-6);
    summary << variant << ',' << ds.n() << ',' << ds.d() << ',' << spec.rank() << ',' << num(profile.tau)
            << ',' << profile.argmax << ',' << num(profile.rho2_sum()) << ','
            << num(spec.response_second_moment) << ',' << (bessel ? 1 : 0) << ','
            << (ds.preprocessing.degenerate_response ? 1 : 0) << '\n';
    ctx.log << "  " << variant << " tau=" << num(profile.tau) << '\n';
    if (!bessel) ctx.numerical_ok = false;
  }
  ctx.emit("tau_summary.csv", summary.str());
}

// --- primal-gd ---------------------------------------------------------------

double step_size(const ExperimentConfig& cfg, const RidgeProblem& p) {
  const std::string& g = cfg.get("gamma");
  if (g == "auto") return 1.0 / p.lambda_max();
  const double v = cfg.get_double("gamma");
  if (!(v > 0.0)) throw Error(ErrorKind::ConfigError, "gamma must be positive or auto");
  return v;
}

void run_primal_gd(Context& ctx) {
  const Dataset data = load_dataset(ctx.cfg);
  const double mu = ctx.cfg.mu();
  const RidgeProblem p = RidgeProblem::from_dataset(data, mu);
  const SpectralDecomposition spec = decompose(data, mu);
  const TauProfile profile = measure_tau(spec);
  const double gamma = step_size(ctx.cfg, p);
  const std::size_t steps = ctx.cfg.get_size("steps");

  GdOptions opts;
  opts.init_label = "zero";
  const OptimizerTrace trace = gd_run(p, Vector(p.dim(), 0.0), gamma, steps, opts);
  std::ostringstream tcsv;
  write_trace_csv(tcsv, trace, TraceColumns::Log10);
  ctx.emit("primal_trace.csv", tcsv.str());

  const double zmin = primal_bound_min_zeta(profile, data.d());
  const Vector zetas = zeta_grid(zmin, spec.z_variances.front(), ctx.cfg.get_size("zeta_points"));
  std::ostringstream env;
  env << "t,zeta,r,bound,measured,holds,flagged\n";
  std::size_t violations = 0;
  for (const auto& rec : trace.steps) {
    for (double z : zetas) {
      const PrimalBound b = primal_bound(profile, spec, gamma, z, rec.t, data.d());
      const bool holds = b.value >= rec.subopt * (1.0 - 1e-12);
      violations += holds ? 0 : 1;
      env << rec.t << ',' << num(z) << ',' << b.r << ',' << num(b.value) << ',' << num(rec.subopt) << ','
          << (holds ? 1 : 0) << ',' << (b.flagged ? 1 : 0) << '\n';
    }
  }
  ctx.emit("primal_envelope.csv", env.str());

  std::ostringstream kap;
  kap << "t,measured,kappa_envelope\n";
  const double q0 = trace.steps.front().subopt;
  for (const auto& rec : trace.steps) {
    kap << rec.t << ',' << num(rec.subopt) << ',' << num(kappa_envelope(q0, p.condition_number(), rec.t)) << '\n';
  }
  ctx.emit("kappa_envelope.csv", kap.str());

  std::ostringstream sum;
  sum << "gamma,lambda_max,kappa,step_flagged,tau,min_admissible_zeta,envelope_violations\n"
      << num(gamma) << ',' << num(p.lambda_max()) << ',' << num(p.condition_number()) << ','
      << (trace.meta.step_flagged ? 1 : 0) << ',' << num(profile.tau) << ',' << num(zmin) << ','
      << violations << '\n';
  ctx.emit("summary.csv", sum.str());
  if (trace.meta.step_flagged) ctx.log << "  warning: gamma >= 2/lambda_max, convergence not guaranteed\n";
  if (violations) ctx.numerical_ok = false;
}

// --- dual-compare ------------------------------------------------------------

struct DualCurve {
  OptimizerTrace trace;
  std::vector<Vector> epoch_alphas;
};

DualCurve run_curve(const DualRidgeProblem& p, RcdmConfig cfg) {
  DualCurve c;
  cfg.track_split = true;
  const std::size_t n = p.n();
  RcdmResult r = rcdm_run(p, cfg, [&](std::size_t t, std::span<const double> alpha) {
    if (t % n == 0) c.epoch_alphas.emplace_back(alpha.begin(), alpha.end());
  });
  c.trace = std::move(r.trace);
  return c;
}

void run_dual_compare(Context& ctx) {
  const SplitDatasets split = load_split(ctx.cfg);
  const double mu = ctx.cfg.mu();
  const double nu = ctx.cfg.nu();
  const DualRidgeProblem p = DualRidgeProblem::from_dataset(split.train, mu);
  const RidgeProblem primal = RidgeProblem::from_dataset(split.train, mu);
  const Vector alpha_nu = homotopic_init(p, nu).alpha0;
  const double base = p.suboptimality(Vector(p.n(), 0.0));
  const double target = ctx.cfg.get_double("target_rel_subopt") * base;

  RcdmConfig rc;
  rc.step_rule = parse_step_rule(ctx.cfg.get("step_rule"));
  rc.sampling = parse_sampling(ctx.cfg.get("sampling"));
  rc.epochs = ctx.cfg.get_size("epochs");
  const auto seeds = ctx.cfg.get_u64s("seeds");
  if (seeds.empty()) throw Error(ErrorKind::ConfigError, "seeds must not be empty");

  std::vector<std::array<DualCurve, 2>> curves(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    RcdmConfig c = rc;
    c.seed = seeds[k];
    c.init = RcdmInit::zero();
    curves[k][0] = run_curve(p, c);
    c.init = RcdmInit::explicit_point(alpha_nu);
    curves[k][1] = run_curve(p, c);
  }, ctx.workers);

  const char* labels[2] = {"zero", "homotopic"};
  std::ostringstream sum;
  sum << "seed,epochs_zero,epochs_homotopic,homotopic_first\n";
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    for (int i = 0; i < 2; ++i) {
      const DualCurve& c = curves[k][i];
      std::ostringstream csv;
      csv << "epoch,t,dual_subopt,rel_dual_subopt,primal_subopt,test_error,kernel_part,image_part\n";
      for (std::size_t e = 0; e < c.trace.steps.size(); ++e) {
        const auto& r = c.trace.steps[e];
        const Vector beta = dual_to_primal(p, c.epoch_alphas[e]);
        csv << r.epoch << ',' << r.t << ',' << num(r.subopt) << ',' << num(r.subopt / base) << ','
            << num(suboptimality(primal, beta)) << ','
            << num(mean_squared_loss(split.test.x, split.test.y, beta)) << ',' << num(r.kernel_part)
            << ',' << num(r.image_part) << '\n';
      }
      ctx.emit(std::string("dual_") + labels[i] + "_seed" + std::to_string(seeds[k]) + ".csv", csv.str());
    }
    const std::size_t ez = epochs_to_reach(curves[k][0].trace, target);
    const std::size_t eh = epochs_to_reach(curves[k][1].trace, target);
    sum << seeds[k] << ',' << epochs_text(ez) << ',' << epochs_text(eh) << ',' << (eh < ez ? 1 : 0) << '\n';
  }
  ctx.emit("summary.csv", sum.str());

  std::ostringstream ref;
  ref << "mu,nu,n_train,n_test,test_error_exact,zero_init_dual_subopt\n"
      << num(mu) << ',' << num(nu) << ',' << split.train.n() << ',' << split.test.n() << ','
      << num(mean_squared_loss(split.test.x, split.test.y, primal.minimizer())) << ',' << num(base) << '\n';
  ctx.emit("reference.csv", ref.str());
}

// --- rcdm-theorem ------------------------------------------------------------

double spectral_gap_rho(const DualRidgeProblem& p) {
  const ThinSVD& s = p.svd();
  if (s.rank() == 0) return 1.0 / static_cast<double>(p.n());
  const double last = s.singulars.back();
  return (last * last / p.mu() + 1.0) / static_cast<double>(p.n());
}

double configured_rho(const ExperimentConfig& cfg, const DualRidgeProblem& p) {
  return cfg.get("rcdm.rho") == "gap" ? spectral_gap_rho(p) : cfg.get_double("rcdm.rho");
}

RcdmConfig theorem_config(const ExperimentConfig& cfg) {
  RcdmConfig rc;
  rc.step_rule = StepRule::Theoretical;
  rc.sampling = Sampling::IidUniform;
  rc.epochs = cfg.get_size("epochs");
  const auto seeds = cfg.get_u64s("seeds");
  rc.seed = seeds.empty() ? 0 : seeds.front();
  return rc;
}

void run_rcdm_theorem(Context& ctx) {
  const Dataset data = load_dataset(ctx.cfg);
  const DualRidgeProblem p = DualRidgeProblem::from_dataset(data, ctx.cfg.mu());
  const RcdmConfig rc = theorem_config(ctx.cfg);
  const double rho = configured_rho(ctx.cfg, p);
  const std::size_t trials = ctx.cfg.get_size("rcdm.trials");

  const TheoremReport th = rcdm_theorem_check(p, rc, rho, trials);
  std::ostringstream tcsv;
  write_theorem_csv(tcsv, th);
  ctx.emit("theorem.csv", tcsv.str());

  const DistanceReport dist = distance_tracking_check(p, rc, trials);
  std::ostringstream dcsv;
  dcsv << "t,mean_dist2,bound,holds\n";
  for (const auto& r : dist.rows) dcsv << r.t << ',' << num(r.mean_dist2) << ',' << num(r.bound) << ',' << (r.holds ? 1 : 0) << '\n';
  ctx.emit("distance.csv", dcsv.str());

  const StepSizes steps = step_sizes(p, StepRule::Theoretical);
  const RhoSplit split = rho_split(p, rho);
  std::ostringstream fcsv;
  fcsv << "t,lhs,rhs,gradient_condition,decrement_holds\n";
  const auto checkpoints = theorem_checkpoints(p.n(), rc.epochs);
  std::vector<Vector> points;
  std::size_t next = 0;
  rcdm_run(p, rc, [&](std::size_t t, std::span<const double> alpha) {
    if (next < checkpoints.size() && checkpoints[next] == t) {
      points.emplace_back(alpha.begin(), alpha.end());
      ++next;
    }
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    const FastConvergenceReport f = fast_convergence_check(p, steps, split, points[i]);
    fcsv << checkpoints[i] << ',' << num(f.lhs) << ',' << num(f.rhs) << ',' << (f.gradient_condition ? 1 : 0)
         << ',' << (f.decrement_holds ? 1 : 0) << '\n';
  }
  ctx.emit("fast_convergence.csv", fcsv.str());

  std::ostringstream scsv;
  scsv << "r,gamma\n";
  for (std::size_t r = 0; r < steps.gamma.size(); ++r) scsv << r << ',' << num(steps.gamma[r]) << '\n';
  ctx.emit("step_sizes.csv", scsv.str());

  std::ostringstream sum;
  sum << "rho,gamma_min,gamma_max,estimated,trials,theorem_holds,distance_holds\n"
      << num(rho) << ',' << num(steps.gamma_min) << ',' << num(steps.gamma_max) << ','
      << (steps.estimated ? 1 : 0) << ',' << trials << ',' << (th.all_hold() ? 1 : 0) << ','
      << (dist.all_hold() ? 1 : 0) << '\n';
  ctx.emit("summary.csv", sum.str());
  if (!th.all_hold() || !dist.all_hold()) ctx.numerical_ok = false;
}

// --- glm-bias ----------------------------------------------------------------

GaussianGlmSpec glm_spec(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
  GaussianGlmSpec spec;
  spec.n = n;
  const Vector variances = cfg.get_doubles("glm.spectrum");
  spec.w_true = cfg.get_doubles("glm.w_true");
  if (variances.empty() || variances.size() != spec.w_true.size()) {
    throw Error(ErrorKind::ConfigError, "glm.spectrum and glm.w_true need the same nonzero length");
  }
  for (double v : variances)
    if (!(v > 0.0)) throw Error(ErrorKind::ConfigError, "glm.spectrum entries must be positive");
  spec.sigma = DenseMatrix::diagonal(variances);
  spec.link = parse_link(cfg.get("glm.link")).kind;
  spec.noise = cfg.get_double("glm.noise");
  spec.seed = seed;
  return spec;
}

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const Vector& x, const Vector& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

void run_glm_bias(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::size_t n = cfg.get_size("glm.n");
  const std::uint64_t seed = cfg.get_u64("glm.seed");
  const GlmProblem pop = generate_gaussian_glm(glm_spec(cfg, n * cfg.get_size("glm.population_factor"), derive_seed(seed, 1)));
  const Vector w_star = glm_minimizer(pop);
  const std::size_t steps = cfg.get_size("glm.steps");
  const Vector w0(pop.d(), 0.0);

  BiasedStepSchedule biased;
  biased.line_search = true;
  biased.grid = ScheduleGrid::defaults(pop.lipschitz());
  const BiasedRun run_b = biased_gd_run(pop, w0, biased, steps, w_star);

  BiasedStepSchedule plain;
  const double l_hat = sym_eig(empirical_covariance(pop.x())).eigenvalues.front();
  plain.fixed = {{1.0 / l_hat, 0.0}};
  const BiasedRun run_p = biased_gd_run(pop, w0, plain, steps, w_star);

  for (const auto& [name, run] : {std::pair<const char*, const BiasedRun*>{"glm_biased_trace.csv", &run_b},
                                  std::pair<const char*, const BiasedRun*>{"glm_plain_trace.csv", &run_p}}) {
    std::ostringstream csv;
    write_trace_csv(csv, run->trace, TraceColumns::Log10);
    ctx.emit(name, csv.str());
  }

  std::ostringstream sched;
  sched << "t,gamma,eta\n";
  for (std::size_t t = 0; t < run_b.used.size(); ++t) sched << t << ',' << num(run_b.used[t].gamma) << ',' << num(run_b.used[t].eta) << '\n';
  ctx.emit("glm_schedule.csv", sched.str());

  // Per Σ-eigendirection contraction of w_t − w*.
  const SymEig eig = sym_eig(pop.sigma());
  std::ostringstream con;
  con << "t,direction,measured,expected\n";
  for (std::size_t t = 1; t < run_b.iterates.size(); ++t) {
    const Vector prev = matvec_t(eig.eigenvectors, subtract(run_b.iterates[t - 1], w_star));
    const Vector cur = matvec_t(eig.eigenvectors, subtract(run_b.iterates[t], w_star));
    for (std::size_t i = 0; i < prev.size(); ++i) {
      if (std::abs(prev[i]) < 1e-8) continue;
      con << t << ',' << i << ',' << num(cur[i] / prev[i]) << ','
          << num(1.0 - eig.eigenvalues[i] / pop.lipschitz()) << '\n';
    }
  }
  ctx.emit("glm_contraction.csv", con.str());

  const auto sizes = cfg.get_u64s("glm.stein_sizes");
  const std::size_t reps = cfg.get_size("glm.stein_replicates");
  Vector xs, ys;
  std::ostringstream st;
  st << "n,rms_residual\n";
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    Vector res(reps);
    parallel_for(reps, [&](std::size_t r) {
      const GlmProblem sample = generate_gaussian_glm(glm_spec(cfg, sizes[s], derive_seed(seed, 1000 + 100 * s + r)));
      res[r] = stein_residual(sample, w_star);
    }, ctx.workers);
    double ms = 0;
    for (double v : res) ms += v * v;
    const double rms = std::sqrt(ms / static_cast<double>(reps));
    xs.push_back(static_cast<double>(sizes[s]));
    ys.push_back(rms);
    st << sizes[s] << ',' << num(rms) << '\n';
  }
  ctx.emit("stein.csv", st.str());

  const SpectralDecomposition spec = decompose(pop.x(), pop.y(), 0.0);
  const TauProfile profile = measure_tau(spec);
  const double c = glm_curvature_constant(pop, w_star);
  std::ostringstream bcsv;
  bcsv << "t,zeta,r,literal,primal_analogous,measured\n";
  const Vector zetas = zeta_grid(0.05 * pop.lipschitz(), 0.95 * pop.lipschitz(), cfg.get_size("zeta_points"));
  for (const auto& rec : run_b.trace.steps) {
    for (double z : zetas) {
      const GlmBound b = glm_bound(profile, pop, c, z, rec.t);
      bcsv << rec.t << ',' << num(z) << ',' << b.r << ',' << num(b.literal) << ',' << num(b.primal_analogous)
           << ',' << num(rec.subopt) << '\n';
    }
  }
  ctx.emit("glm_bounds.csv", bcsv.str());

  std::ostringstream sum;
  sum << "link,L,c_wstar,tau,stein_slope,final_subopt_biased,final_subopt_plain\n"
      << pop.link().name() << ',' << num(pop.lipschitz()) << ',' << num(c) << ',' << num(profile.tau) << ','
      << num(xs.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN()) << ','
      << num(run_b.trace.steps.back().subopt) << ',' << num(run_p.trace.steps.back().subopt) << '\n';
  ctx.emit("summary.csv", sum.str());
}

// --- all-bounds --------------------------------------------------------------

struct BoundRows {
  std::ostringstream out;
  std::size_t gating_failures = 0;

  BoundRows() { out << "bound,param,t,bound_value,measured,holds,gating\n"; }
  void add(const std::string& bound, double param, std::size_t t, double value, double measured,
           bool holds, bool gating) {
    out << bound << ',' << num(param) << ',' << t << ',' << num(value) << ',' << num(measured) << ','
        << (holds ? 1 : 0) << ',' << (gating ? 1 : 0) << '\n';
    if (gating && !holds) ++gating_failures;
  }
};

void run_all_bounds(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Dataset data = load_dataset(cfg);
  const double mu = cfg.mu();
  const double nu = cfg.nu();
  const std::size_t d = data.d();
  BoundRows rows;

  // Primal suboptimality envelope, zero init, γ = 1/λ₁.
  {
    const RidgeProblem p = RidgeProblem::from_dataset(data, mu);
    const SpectralDecomposition spec = decompose(data, mu);
    const TauProfile profile = measure_tau(spec);
    const double gamma = 1.0 / p.lambda_max();
    const std::size_t steps = cfg.get_size("steps");
    const OptimizerTrace trace = gd_run(p, Vector(d, 0.0), gamma, steps);
    const double zmin = primal_bound_min_zeta(profile, d);
    const Vector zetas = zeta_grid(zmin, spec.z_variances.front(), cfg.get_size("zeta_points"));
    const auto times = report_times(steps);
    for (const auto& rec : trace.steps) {
      if (!std::binary_search(times.begin(), times.end(), rec.t)) continue;
      for (double z : zetas) {
        const PrimalBound b = primal_bound(profile, spec, gamma, z, rec.t, d);
        rows.add("primal-sub", z, rec.t, b.value, rec.subopt, b.value >= rec.subopt * (1 - 1e-12), true);
      }
      for (double z : {zmin * 0.1, zmin * 0.01}) {
        const PrimalBound b = primal_bound(profile, spec, gamma, z, rec.t, d);
        rows.add("primal-sub-below-admissible", z, rec.t, b.value, rec.subopt, b.value >= rec.subopt, false);
      }
    }

    // Homotopic path distance and the kernel / gap identities.
    const DualRidgeProblem dp = DualRidgeProblem::from_dataset(data, mu);
    const DualRidgeProblem dn = dp.with_mu(nu);
    const Vector diff = subtract(dn.minimizer(), dp.minimizer());
    const double measured = dot(diff, diff);
    const double zlo = homotopic_distance_min_zeta(spec, mu, nu);
    for (double z : zeta_grid(zlo, std::max(zlo, spec.z_variances.front()), cfg.get_size("zeta_points"))) {
      const double b = homotopic_distance_bound(profile, spec, mu, nu, z, data.n(), d);
      rows.add("homotopic-distance", z, 0, b, measured, b >= measured * (1 - 1e-12), true);
    }
    const ThinSVD& svd = dp.svd();
    const Vector coords = matvec_t(svd.left, diff);
    Vector kernel = diff;
    simd::axpy(-1.0, matvec(svd.left, coords), kernel);
    const double knorm = norm2(kernel);
    const double kbound = 1e-8 * norm2(dp.minimizer());
    rows.add("dual-init-kernel", nu, 0, kbound, knorm, knorm <= kbound, true);
    const Vector gap = dual_init_gap(spec, mu, nu);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const double direct = coords[i] * coords[i];
      const double rel = std::abs(gap[i] - direct) / std::max(direct, 1e-300);
      rows.add("dual-init-gap", static_cast<double>(i), 0, gap[i], direct, rel <= 1e-8 || std::abs(gap[i] - direct) <= 1e-14 * dot(diff, diff), true);
    }

    // RCDM theorem, distance tracking and one-step fast convergence.
    const RcdmConfig rc = theorem_config(cfg);
    const double rho = configured_rho(cfg, dp);
    const std::size_t trials = cfg.get_size("rcdm.trials");
    const TheoremReport th = rcdm_theorem_check(dp, rc, rho, trials);
    for (const auto& r : th.rows) {
      rows.add("rcdm-theorem", rho, r.t, r.subopt_holds ? r.rhs_subopt : r.rhs_grad,
               r.subopt_holds ? r.lhs_subopt : r.lhs_grad, r.holds, true);
    }
    const DistanceReport dr = distance_tracking_check(dp, rc, trials);
    for (const auto& r : dr.rows) rows.add("rcdm-distance", dr.ratio, r.t, r.bound, r.mean_dist2, r.holds, true);
    const FastConvergenceReport f =
        fast_convergence_check(dp, step_sizes(dp, StepRule::Theoretical), rho_split(dp, rho), Vector(data.n(), 0.0));
    rows.add("rcdm-fast-convergence", rho, 0, f.rhs, f.lhs, f.decrement_holds || !f.gradient_condition, false);
  }

  // GLM envelope, squared link on the sample's own covariance.
  {
    GaussianGlmSpec gs = glm_spec(cfg, cfg.get_size("glm.n"), derive_seed(cfg.get_u64("glm.seed"), 2));
    gs.link = LinkKind::Squared;
    const GlmProblem raw = generate_gaussian_glm(gs);
    const GlmProblem p = GlmProblem::with_empirical_covariance(raw.x(), raw.y(), LinkFunction::squared());
    const Vector w_star = glm_minimizer(p);
    BiasedStepSchedule sched;
    sched.fixed = {{1.0 / (2.0 * p.lipschitz()), 0.0}};
    const std::size_t steps = cfg.get_size("glm.steps");
    const BiasedRun run = biased_gd_run(p, Vector(p.d(), 0.0), sched, steps, w_star);
    const SpectralDecomposition spec = decompose(p.x(), p.y(), 0.0);
    const TauProfile profile = measure_tau(spec);
    const double c = glm_curvature_constant(p, w_star);
    const double zmin = profile.rho2_sum() / (2.0 * static_cast<double>(p.d()) * profile.tau);
    const double l = p.lipschitz();
    for (const auto& rec : run.trace.steps) {
      for (double z : zeta_grid(std::min(zmin, 0.5 * l), 0.99 * l, cfg.get_size("zeta_points"))) {
        const GlmBound b = glm_bound(profile, p, c, z, rec.t);
        rows.add("glm-zero-init-primal-reading", z, rec.t, b.primal_analogous, rec.subopt,
                 b.primal_analogous >= rec.subopt - 1e-12 * std::abs(rec.subopt), z >= zmin);
        rows.add("glm-zero-init-literal-reading", z, rec.t, b.literal, rec.subopt, b.literal >= rec.subopt, false);
      }
    }
  }

  ctx.emit("bounds.csv", rows.out.str());
  ctx.log << "  gating failures: " << rows.gating_failures << '\n';
  if (rows.gating_failures) ctx.numerical_ok = false;
}

using Runner = void (*)(Context&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"tau-profile", run_tau_profile}, {"primal-gd", run_primal_gd},
      {"dual-compare", run_dual_compare}, {"rcdm-theorem", run_rcdm_theorem},
      {"glm-bias", run_glm_bias},       {"all-bounds", run_all_bounds},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : runners()) v.push_back(k);
    return v;
  }();
  return names;
}

RunResult run_experiment(const std::string& experiment, const ExperimentConfig& cfg, std::ostream& log) {
  const auto it = runners().find(experiment);
  if (it == runners().end()) throw Error(ErrorKind::ConfigError, "unknown experiment '" + experiment + "'");
  // Validate the numeric keys up front so malformed configs fail before any compute.
  (void)cfg.mu();
  (void)cfg.nu();
  (void)cfg.get_u64s("seeds");

  const auto start = std::chrono::steady_clock::now();
  Context ctx{cfg, log, fs::path(cfg.get("outputs_dir")) / experiment / cfg.hash(experiment), {}};
  ctx.workers = cfg.get_size("workers");
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "outputs_dir not writable: " + ec.message());
  log << experiment << " -> " << ctx.dir.string() << '\n';

  it->second(ctx);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunResult result;
  result.directory = ctx.dir;
  result.files = ctx.files;
  result.manifest = ctx.dir / "manifest.txt";
  result.numerical_ok = ctx.numerical_ok;
  detail::write_manifest(result.manifest, experiment, cfg, ctx.files, secs);
  return result;
}

}  // namespace hopt
