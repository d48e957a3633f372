#include "hexact/heston.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <thread>

#include "hexact/errors.hpp"

namespace hexact {

namespace {

// Runs fn(begin, end, chunk) for every chunk of kPathChunk items over the
// worker threads.  The first exception, in chunk order, is rethrown.
void parallel_chunks(std::uint64_t n_items, unsigned threads,
                     const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
  const std::uint64_t n_chunks = (n_items + kPathChunk - 1) / kPathChunk;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(n_chunks, 1)));
  std::vector<std::exception_ptr> errors(n_chunks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t c; (c = next.fetch_add(1)) < n_chunks;) {
      try {
        fn(c * kPathChunk, std::min(n_items, (c + 1) * kPathChunk), c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Running mean / sum of squared deviations with Chan's merge.
struct Accumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t proposals = 0;
  std::uint64_t integral_draws = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const Accumulator& o) {
    if (o.n == 0) return;
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    const double d = o.mean - mean;
    mean += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    n += o.n;
    proposals += o.proposals;
    integral_draws += o.integral_draws;
  }
};

// Per-path simulator: returns the undiscounted payoff and adds its
// acceptance-rejection statistics to the accumulator.
using PathFn = std::function<double(RngStream&, Accumulator&)>;

// Simulates every path with its own split stream and reduces the chunk
// accumulators in chunk order.  make_path builds one simulator per chunk.
PricingReport run_pricing(const SimulationOptions& opts, double discount, const std::function<PathFn()>& make_path) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t n_chunks = (opts.n_paths + kPathChunk - 1) / kPathChunk;
  std::vector<Accumulator> partial(n_chunks);
  const RngStream parent(opts.seed);
  parallel_chunks(opts.n_paths, opts.threads, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t c) {
    auto path = make_path();
    Accumulator acc;
    for (std::uint64_t i = begin; i < end; ++i) {
      auto rng = parent.split(i);
      acc.add(path(rng, acc));
    }
    partial[c] = acc;
  });
  Accumulator total;
  for (const auto& a : partial) total.merge(a);

  PricingReport r;
  r.n_paths = total.n;
  r.scheme = opts.scheme;
  r.K = opts.K;
  r.estimate = discount * total.mean;
  r.standard_error = total.n > 1 ? discount * std::sqrt(total.m2 / static_cast<double>(total.n - 1) / total.n) : 0.0;
  r.proposals_mean =
      total.integral_draws ? static_cast<double>(total.proposals) / static_cast<double>(total.integral_draws) : 0.0;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

X2Mode mode_of(Scheme s) {
  return s == Scheme::ExactGammaBaseline ? X2Mode::TruncationBaseline : X2Mode::DirectInversion;
}

// Advances (S, V) over `intervals` equal intervals of length dt, calling
// visit(S, V) after each; visit returns false to stop the path early.
class PathAdvancer {
public:
  PathAdvancer(const HestonParams& p, const SimulationOptions& opts, const TableSet& tables, double dt,
               int euler_substeps)
      : params_(p), exact_(is_exact(opts.scheme)), dt_(dt), substeps_(euler_substeps) {
    if (exact_) stepper_.emplace(p, dt, opts.K, tables, mode_of(opts.scheme));
  }

  template <class Visit>
  void run(int intervals, RngStream& rng, Accumulator& acc, Visit visit) {
    double s = params_.s0, v = params_.v0;
    double log_s = std::log(s);
    for (int j = 0; j < intervals; ++j) {
      if (exact_) {
        const auto r = stepper_->step(s, v, rng);
        s = r.s;
        v = r.v;
        acc.proposals += r.proposals;
        ++acc.integral_draws;
      } else {
        euler_advance(log_s, v, params_, dt_ / substeps_, substeps_, rng);
        s = std::exp(log_s);
      }
      if (!visit(s, v)) return;
    }
  }

private:
  HestonParams params_;
  bool exact_;
  double dt_;
  int substeps_;
  std::optional<ExactStepper> stepper_;  // empty for Euler
};

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ExactDirect: return "exact-direct";
    case Scheme::ExactGammaBaseline: return "exact-gamma-baseline";
    case Scheme::EulerFullTruncation: return "euler-ft";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (auto s : {Scheme::ExactDirect, Scheme::ExactGammaBaseline, Scheme::EulerFullTruncation})
    if (to_string(s) == name) return s;
  throw InvalidArgument("unknown scheme '" + std::string(name) +
                        "' (expected exact-direct, exact-gamma-baseline or euler-ft)");
}

bool is_exact(Scheme scheme) { return scheme != Scheme::EulerFullTruncation; }

ExactStepper::ExactStepper(const HestonParams& params, double dt, int K, const TableSet& tables, X2Mode mode)
    : params_(params),
      dt_(dt),
      tables_(&tables),
      cir_(CirTransitionParams::make(params.kappa, params.theta, params.sigma, dt)),
      bridge_(BridgeConfig::from_heston(params, 0.0, 0.0, dt, K, mode)),
      scale_(4 / (params.sigma * params.sigma)) {}

StepResult ExactStepper::step(double s, double v, RngStream& rng) {
  if (!(s > 0)) throw InvalidArgument("exact_step: s must be positive");
  if (!(v >= 0)) throw InvalidArgument("exact_step: v must be nonnegative");
  const auto& p = params_;
  const double v_next = sample_cir_transition(v, cir_, rng);
  bridge_.a0 = v;
  bridge_.a_tau = v_next;
  const auto draw = sample_integral_Q(bridge_, *tables_, rng);
  const double iv = scale_ * draw.value;
  const double mean = p.mu * dt_ + p.rho / p.sigma * (v_next - v - p.kappa * p.theta * dt_) +
                      (p.rho * p.kappa / p.sigma - 0.5) * iv;
  const double sd = std::sqrt(std::max(0.0, (1 - p.rho * p.rho) * iv));
  const double z = sample_normal(0.0, 1.0, rng);
  return {s * std::exp(mean + sd * z), v_next, iv, draw.proposals};
}

StepResult exact_step(double s, double v, double dt, const HestonParams& params, int K, const TableSet& tables,
                      RngStream& rng, X2Mode mode) {
  if (!(dt > 0)) throw InvalidArgument("exact_step: dt must be positive");
  ExactStepper stepper(params, dt, K, tables, mode);
  return stepper.step(s, v, rng);
}

void euler_advance(double& log_s, double& v, const HestonParams& p, double dt, int n_steps, RngStream& rng) {
  const double rho_bar = std::sqrt(std::max(0.0, 1 - p.rho * p.rho));
  const double sqrt_dt = std::sqrt(dt);
  for (int k = 0; k < n_steps; ++k) {
    const double vp = std::max(v, 0.0);
    const double z1 = sample_normal(0.0, 1.0, rng);
    const double z2 = sample_normal(0.0, 1.0, rng);
    const double vol = std::sqrt(vp) * sqrt_dt;
    log_s += (p.mu - 0.5 * vp) * dt + vol * (p.rho * z1 + rho_bar * z2);
    v += p.kappa * (p.theta - vp) * dt + p.sigma * vol * z1;
  }
}

EulerPath euler_full_truncation_path(const HestonParams& params, int n_steps, RngStream& rng, bool keep_path) {
  params.validate();
  if (n_steps < 1) throw InvalidArgument("euler_full_truncation_path: n_steps must be at least 1");
  const double dt = params.t / n_steps;
  EulerPath out;
  double log_s = std::log(params.s0), v = params.v0;
  if (keep_path) {
    out.s_path.reserve(n_steps);
    out.v_path.reserve(n_steps);
    for (int k = 0; k < n_steps; ++k) {
      euler_advance(log_s, v, params, dt, 1, rng);
      out.s_path.push_back(std::exp(log_s));
      out.v_path.push_back(v);
    }
  } else {
    euler_advance(log_s, v, params, dt, n_steps, rng);
  }
  out.s = std::exp(log_s);
  out.v = v;
  return out;
}

void SimulationOptions::validate() const {
  if (n_paths < 1) throw InvalidArgument("SimulationOptions: n_paths must be at least 1");
  if (K < 0) throw InvalidArgument("SimulationOptions: K must be nonnegative");
  if (euler_steps < 0) throw InvalidArgument("SimulationOptions: euler_steps must be nonnegative");
}

int SimulationOptions::resolved_euler_steps() const {
  if (euler_steps > 0) return euler_steps;
  return std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_paths)))));
}

PricingReport price_european_call(const HestonParams& params, double strike, const SimulationOptions& opts,
                                  const TableSet& tables) {
  params.validate();
  opts.validate();
  if (!(strike >= 0)) throw InvalidArgument("price_european_call: strike must be nonnegative");
  const int substeps = is_exact(opts.scheme) ? 1 : opts.resolved_euler_steps();
  return run_pricing(opts, std::exp(-params.mu * params.t), [&]() -> PathFn {
    auto adv = std::make_shared<PathAdvancer>(params, opts, tables, params.t, substeps);
    return [adv, strike](RngStream& rng, Accumulator& acc) {
      double s_t = 0.0;
      adv->run(1, rng, acc, [&](double s, double) {
        s_t = s;
        return true;
      });
      return std::max(s_t - strike, 0.0);
    };
  });
}

PricingReport price_asian_call(const HestonParams& params, double strike, int n_fixings,
                               const SimulationOptions& opts, const TableSet& tables) {
  params.validate();
  opts.validate();
  if (n_fixings < 1) throw InvalidArgument("price_asian_call: n_fixings must be at least 1");
  if (!(strike >= 0)) throw InvalidArgument("price_asian_call: strike must be nonnegative");
  const int substeps = is_exact(opts.scheme) ? 1 : ceil_div(opts.resolved_euler_steps(), n_fixings);
  const double dt = params.t / n_fixings;
  return run_pricing(opts, std::exp(-params.mu * params.t), [&]() -> PathFn {
    auto adv = std::make_shared<PathAdvancer>(params, opts, tables, dt, substeps);
    return [adv, strike, n_fixings](RngStream& rng, Accumulator& acc) {
      double sum = 0.0;
      adv->run(n_fixings, rng, acc, [&](double s, double) {
        sum += s;
        return true;
      });
      return std::max(sum / n_fixings - strike, 0.0);
    };
  });
}

PricingReport price_double_no_touch(const HestonParams& params, double lower, double upper, double steps_per_year,
                                    const SimulationOptions& opts, const TableSet& tables) {
  params.validate();
  opts.validate();
  if (!(lower >= 0 && lower < params.s0 && params.s0 < upper))
    throw InvalidArgument("price_double_no_touch: need 0 <= lower < s0 < upper");
  const double exact_dates = steps_per_year * params.t;
  const long dates = std::lround(exact_dates);
  if (!(steps_per_year > 0) || dates < 1 || std::fabs(exact_dates - static_cast<double>(dates)) > 1e-9 * exact_dates)
    throw InvalidArgument("price_double_no_touch: steps_per_year * t must be a positive integer");
  const int n_dates = static_cast<int>(dates);
  const int substeps =
      is_exact(opts.scheme) || opts.euler_steps == 0 ? 1 : ceil_div(opts.euler_steps, n_dates);
  const double dt = params.t / n_dates;
  return run_pricing(opts, std::exp(-params.mu * params.t), [&]() -> PathFn {
    auto adv = std::make_shared<PathAdvancer>(params, opts, tables, dt, substeps);
    return [adv, lower, upper, n_dates](RngStream& rng, Accumulator& acc) {
      bool alive = true;
      adv->run(n_dates, rng, acc, [&](double s, double) {
        alive = s > lower && s < upper;
        return alive;
      });
      return alive ? 1.0 : 0.0;
    };
  });
}

std::vector<TerminalState> simulate_terminal(const HestonParams& params, int n_steps, const SimulationOptions& opts,
                                             const TableSet& tables) {
  params.validate();
  opts.validate();
  if (n_steps < 1) throw InvalidArgument("simulate_terminal: n_steps must be at least 1");
  const int substeps = is_exact(opts.scheme) ? 1 : ceil_div(opts.resolved_euler_steps(), n_steps);
  std::vector<TerminalState> out(opts.n_paths);
  const RngStream parent(opts.seed);
  parallel_chunks(opts.n_paths, opts.threads, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t) {
    PathAdvancer adv(params, opts, tables, params.t / n_steps, substeps);
    Accumulator acc;
    for (std::uint64_t i = begin; i < end; ++i) {
      auto rng = parent.split(i);
      adv.run(n_steps, rng, acc, [&](double s, double v) {
        out[i] = {s, v};
        return true;
      });
    }
  });
  return out;
}

std::vector<MomentErrorRow> moment_error_report(const HestonParams& params, double t,
                                                const std::vector<double>& v_t_list, const std::vector<int>& K_list,
                                                std::uint64_t n_paths, std::uint64_t seed, const TableSet& tables,
                                                X2Mode mode, unsigned threads) {
  params.validate();
  if (n_paths < 2) throw InvalidArgument("moment_error_report: n_paths must be at least 2");
  const double scale = 4 / (params.sigma * params.sigma);
  std::vector<MomentErrorRow> rows;
  std::uint64_t combo = 0;
  for (const double vt : v_t_list) {
    if (!(vt >= 0)) throw InvalidArgument("moment_error_report: v_t must be nonnegative");
    for (const int K : K_list) {
      const auto cfg = BridgeConfig::from_heston(params, params.v0, vt, t, K, mode);
      const auto exact = exact_moments_Q(cfg, 4);
      std::vector<double> draws(n_paths);
      const RngStream parent = RngStream(seed).split(combo++);
      parallel_chunks(n_paths, threads, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t) {
        for (std::uint64_t i = begin; i < end; ++i) {
          auto rng = parent.split(i);
          draws[i] = scale * sample_integral_Q(cfg, tables, rng).value;
        }
      });
      const double n = static_cast<double>(n_paths);
      for (int k = 1; k <= 4; ++k) {
        double mean = 0.0;
        for (const double x : draws) mean += std::pow(x, k);
        mean /= n;
        double ss = 0.0;
        for (const double x : draws) ss += (std::pow(x, k) - mean) * (std::pow(x, k) - mean);
        MomentErrorRow row;
        row.v_t = vt;
        row.K = K;
        row.order = k;
        row.exact = exact[k - 1] * std::pow(scale, k);
        row.sample = mean;
        row.abs_error = std::fabs(mean - row.exact);
        row.three_se = 3 * std::sqrt(ss / (n - 1) / n);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

X2BiasReport x2_rounding_bias(const HestonParams& params, std::uint64_t strata, int replicates, std::uint64_t seed,
                              const TableSet& tables) {
  params.validate();
  if (strata < 1 || replicates < 2) throw InvalidArgument("x2_rounding_bias: need strata >= 1 and replicates >= 2");
  const auto digits = decompose_h(params.delta() / 2);
  // One slot per table evaluation made by a Y_2^h draw (see sample_y2).
  std::vector<const InverseCdfTable*> slots;
  if (digits.whole > 0)
    for (const auto& [base, m] : decompose_count(digits.whole).multiplicities)
      for (std::int64_t i = 0; i < m; ++i) slots.push_back(&tables.count_table(base));
  for (const auto& [k, m] : digits.digits)
    for (int i = 0; i < m; ++i) slots.push_back(&tables.h_table(k));

  const RngStream parent(seed);
  const double n = static_cast<double>(strata);
  std::vector<double> estimates;
  for (int r = 0; r < replicates; ++r) {
    auto rng = parent.split(static_cast<std::uint64_t>(r));
    double total = 0.0;
    for (const auto* table : slots) {
      double sum = 0.0;
      for (std::uint64_t i = 0; i < strata; ++i) sum += quantile(*table, (static_cast<double>(i) + rng.next_uniform()) / n);
      total += sum / n;
    }
    estimates.push_back(total);
  }
  double mean = 0.0;
  for (const double e : estimates) mean += e;
  mean /= replicates;
  double ss = 0.0;
  for (const double e : estimates) ss += (e - mean) * (e - mean);

  X2BiasReport rep;
  rep.h = digits.h;
  rep.h_rounded = digits.rounded();
  rep.predicted = (rep.h_rounded - rep.h) / rep.h;
  const double exact_mean = rep.h / 3;  // E[Y_2^h]; X2 = tau^2 Y_2^h, so the ratio is tau-free
  rep.measured = mean / exact_mean - 1;
  rep.standard_error = std::sqrt(ss / (replicates - 1) / replicates) / exact_mean;
  rep.draws = strata * static_cast<std::uint64_t>(replicates);
  return rep;
}

}  // namespace hexact
