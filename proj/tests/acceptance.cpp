// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.
//   acceptance              criteria 1-9 and 11
//   acceptance --long       adds the mountain-car criterion (10)
//   acceptance --only N     just criterion N (repeatable)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pdcv/environments.hpp"
#include "pdcv/harness.hpp"
#include "pdcv/oracle.hpp"
#include "pdcv/returns.hpp"
#include "pdcv/rng.hpp"

namespace {

using namespace pdcv;

struct Verdict {
  bool pass;
  std::string detail;
};

int worker_count() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

StepSample random_step(Rng& rng) {
  StepSample s;
  s.reward = rng.uniform(-3, 1);
  s.rho = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0, 3);
  s.pi = rng.uniform();
  s.q = rng.uniform(-10, 0);
  s.expected_q = rng.uniform(-10, 0);
  s.v = rng.uniform(-10, 0);
  return s;
}

std::vector<double> random_row(Rng& rng, std::size_t k, double floor) {
  std::vector<double> row(k);
  double sum = 0;
  for (auto& p : row) sum += (p = floor + rng.uniform());
  for (auto& p : row) p /= sum;
  return row;
}

Verdict zero_mean_correction() {
  Rng rng(101);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pi = random_row(rng, 4, 0.0);
    const auto mu = random_row(rng, 4, 0.05);
    std::vector<double> q(4);
    for (auto& v : q) v = rng.uniform(-10, 10);
    double e = 0;
    for (int a = 0; a < 4; ++a) e += pi[a] * q[a];
    double total = 0;
    for (int a = 0; a < 4; ++a) total += mu[a] * (e - importance_ratio(pi[a], mu[a]) * q[a]);
    worst = std::max(worst, std::abs(total));
  }
  return {worst <= 1e-12, fmt("max |sum| = %.3g", worst)};
}

TabularMdp random_mdp(Rng& rng) {
  // Three live states and one absorbing terminal.
  const std::size_t n = 4;
  std::vector<std::vector<Outcome>> dyn;
  std::vector<bool> terminal{false, false, false, true};
  for (StateId s = 0; s < n; ++s) {
    for (ActionId a = 0; a < 2; ++a) {
      if (terminal[s]) {
        dyn.emplace_back();
        continue;
      }
      const std::size_t k = 1 + rng.next_u64() % 3;
      const auto probs = random_row(rng, k, 0.1);
      std::vector<Outcome> outs;
      for (std::size_t i = 0; i < k; ++i) outs.push_back({probs[i], rng.uniform(-2, 1), rng.next_u64() % n});
      dyn.push_back(outs);
    }
  }
  return TabularMdp(std::vector<std::size_t>(n, 2), dyn, terminal, rng.uniform(0.5, 1.0), {1.0, 0, 0, 0});
}

Verdict oracle_equivalence() {
  Rng rng(102);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_mdp(rng);
    std::vector<std::vector<double>> mu_rows, pi_rows;
    for (int s = 0; s < 4; ++s) {
      mu_rows.push_back(random_row(rng, 2, 0.1));
      pi_rows.push_back(random_row(rng, 2, 0.0));
    }
    const DiscretePolicy mu(mu_rows), pi(pi_rows);
    TabularQ q(m);
    for (StateId s = 0; s < 3; ++s)
      for (ActionId a = 0; a < 2; ++a) q.at(s, a) = rng.uniform(-5, 5);
    for (StateId s = 0; s < 3; ++s) {
      for (ActionId a = 0; a < 2; ++a) {
        for (std::size_t n = 1; n <= 4; ++n) {
          const double is = enumerate_expected_return(m, mu, pi, {Variant::SarsaIs, n}, q, s, a);
          for (double c : {-1.0, 0.5}) {
            const double cv = enumerate_expected_return(m, mu, pi, {Variant::CvSarsa, n, 1.0, c}, q, s, a);
            worst = std::max(worst, std::abs(cv - is));
          }
        }
      }
    }
  }
  return {worst <= 1e-12, fmt("max |cv - is| = %.3g", worst)};
}

Verdict one_step_collapse() {
  Rng rng(103);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::vector<StepSample> w{random_step(rng)};
    const bool terminal = rng.uniform() < 0.2;
    const ReturnContext ctx{w, terminal ? std::nullopt : std::optional(random_step(rng)), rng.uniform(0.5, 1.0)};
    if (nstep_return({Variant::CvSarsa, 1, ctx.gamma, -1.0}, ctx) !=
        nstep_return({Variant::ExpectedSarsa, 1, ctx.gamma, -1.0}, ctx)) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " of 10000 differ"};
}

Verdict exact_q_collapse() {
  // Ten states in a line, the last absorbing; left is clamped at 0.
  const std::size_t n = 10;
  std::vector<std::vector<Outcome>> dyn;
  std::vector<bool> terminal(n, false);
  terminal[n - 1] = true;
  for (StateId s = 0; s < n; ++s) {
    if (terminal[s]) {
      dyn.emplace_back();
      dyn.emplace_back();
      continue;
    }
    dyn.push_back({{1.0, -1.0, s == 0 ? 0 : s - 1}});
    dyn.push_back({{1.0, -1.0, s + 1}});
  }
  std::vector<double> start(n, 0.0);
  start[0] = 1.0;
  const TabularMdp chain(std::vector<std::size_t>(n, 2), dyn, terminal, 1.0, start);
  const DiscretePolicy pi(std::vector<std::vector<double>>(n, {0.3, 0.7}));
  const DiscretePolicy mu = DiscretePolicy::uniform(n, 2);
  const auto truth = exact_q(chain, pi, 1e-13);

  ModelEnvironment env(chain);
  Rng rng(104);
  double worst = 0;
  for (int episode = 0; episode < 200; ++episode) {
    const auto traj = sample_episode(env, mu, pi, rng, 100000);
    std::vector<StepSample> samples;
    for (const auto& tr : traj.transitions) {
      const double e = pi.prob(tr.state, 0) * truth.q.value(tr.state, 0) +
                       pi.prob(tr.state, 1) * truth.q.value(tr.state, 1);
      samples.push_back({tr.reward, tr.rho, pi.prob(tr.state, tr.action), truth.q.value(tr.state, tr.action), e, e});
    }
    for (std::size_t t = 0; t < samples.size(); ++t) {
      const double es = nstep_return({Variant::ExpectedSarsa, 1}, window(samples, true, t, 1, 1.0));
      for (std::size_t k = 1; k <= 8; ++k) {
        const double cv = nstep_return({Variant::CvSarsa, k}, window(samples, true, t, k, 1.0));
        worst = std::max(worst, std::abs(cv - es));
      }
    }
  }
  return {worst <= 1e-10, fmt("max |cv - es| = %.3g", worst)};
}

Verdict lambda_identities() {
  struct Pair {
    Variant variant;
    TdErrorForm form;
  };
  const Pair pairs[] = {{Variant::SarsaIs, TdErrorForm::Sarsa},
                        {Variant::CvSarsa, TdErrorForm::CvSarsa},
                        {Variant::TreeBackup, TdErrorForm::TreeBackup},
                        {Variant::StateCv, TdErrorForm::StateValue}};
  Rng rng(105);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    FrozenEpisode ep;
    const std::size_t length = 1 + rng.next_u64() % 12;
    for (std::size_t k = 0; k < length; ++k) ep.steps.push_back(random_step(rng));
    const double gamma = rng.uniform(0.5, 1.0);
    for (double lambda : {0.0, 0.3, 0.7, 1.0}) {
      for (const auto& p : pairs) {
        const ReturnEstimatorSpec spec{p.variant, 1, gamma, -1.0};
        for (std::size_t t = 0; t < length; ++t) {
          worst = std::max(worst, std::abs(lambda_return_weighted(ep, t, spec, lambda) -
                                            lambda_return_tderror_sum(ep, t, gamma, lambda, p.form)));
        }
      }
    }
  }
  return {worst <= 1e-10, fmt("max gap = %.3g", worst)};
}

Verdict tree_backup_dual_form() {
  Rng rng(106);
  double worst = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 5;
    const bool terminal = rng.uniform() < 0.3;
    std::vector<std::vector<double>> pis(n + 1), qs(n + 1);
    std::vector<ActionRowStep> rows;
    std::vector<StepSample> samples;
    for (std::size_t k = 0; k <= n; ++k) {
      pis[k] = random_row(rng, 4, 0.0);
      for (int a = 0; a < 4; ++a) qs[k].push_back(rng.uniform(-10, 0));
      const ActionId act = rng.next_u64() % 4;
      const double reward = rng.uniform(-2, 0);
      rows.push_back({reward, act, pis[k], qs[k]});
      double e = 0;
      for (int a = 0; a < 4; ++a) e += pis[k][a] * qs[k][a];
      samples.push_back({reward, 1.0, pis[k][act], qs[k][act], e, 0.0});
    }
    const double gamma = rng.uniform(0.5, 1.0);
    const auto row_boot = terminal ? std::nullopt : std::optional(rows[n]);
    const auto sample_boot = terminal ? std::nullopt : std::optional(samples[n]);
    const double a = nstep_tree_backup_return_sum_form(std::span(rows.data(), n), row_boot, gamma);
    const double b = nstep_tree_backup_return({std::span<const StepSample>(samples.data(), n), sample_boot, gamma});
    worst = std::max(worst, std::abs(a - b));
  }
  return {worst <= 1e-12, fmt("max gap = %.3g", worst)};
}

std::map<std::pair<StateId, ActionId>, double> read_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture " + path.string());
  std::string line;
  std::getline(in, line);
  std::map<std::pair<StateId, ActionId>, double> out;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string s, a, q;
    std::getline(row, s, ',');
    std::getline(row, a, ',');
    std::getline(row, q);
    out[{std::stoul(s), std::stoul(a)}] = std::stod(q);
  }
  return out;
}

Verdict oracle_quality() {
  const GridWorld grid;
  const auto model = gridworld_model(grid);
  const auto uniform = DiscretePolicy::uniform(25, 4);
  const auto north = gridworld_north_policy(grid, 0.5);
  const std::filesystem::path dir = PDCV_FIXTURE_DIR;
  double residual = 0, fixture_gap = 0, symmetry_gap = 0;
  for (const auto& [policy, file] : {std::pair{&uniform, "gridworld_equiprobable_q.csv"},
                                     std::pair{&north, "gridworld_north_eps05_q.csv"}}) {
    const auto truth = exact_q(model, *policy);
    residual = std::max(residual, bellman_residual(model, *policy, truth.q));
    const auto fixture = read_fixture(dir / file);
    if (fixture.size() != truth.pairs.size()) return {false, std::string("fixture size mismatch in ") + file};
    for (const auto& [key, q] : fixture) {
      fixture_gap = std::max(fixture_gap, std::abs(truth.q.value(key.first, key.second) - q));
    }
    if (policy == &uniform) {
      for (const auto& [s, a] : truth.pairs) {
        symmetry_gap = std::max(symmetry_gap, std::abs(truth.q.value(s, a) -
                                                       truth.q.value(grid.rotate_state(s), GridWorld::rotate_action(a))));
      }
    }
  }
  const bool pass = residual < 1e-9 && fixture_gap <= 1e-8 && symmetry_gap <= 1e-9;
  return {pass, fmt("residual %.3g, fixture gap %.3g, symmetry gap %.3g", residual, fixture_gap, symmetry_gap)};
}

using RowIndex = std::map<std::pair<std::string, double>, AggregateRow>;

RowIndex index_rows(const std::vector<AggregateRow>& rows) {
  RowIndex idx;
  for (const auto& r : rows) idx[{r.algorithm + "/" + std::to_string(r.n), r.alpha}] = r;
  return idx;
}

std::string key(Variant v, std::size_t n) { return std::string(to_string(v)) + "/" + std::to_string(n); }

void print_table(const std::vector<AggregateRow>& rows) {
  for (const auto& r : rows) {
    std::printf("    %-16s n=%zu alpha=%-5.2f mean=%-12.6g se=%-10.4g diverged=%zu\n", r.algorithm.c_str(), r.n,
                r.alpha, r.mean, r.std_error, r.diverged);
  }
}

std::vector<AggregateRow> sweep(ExperimentConfig cfg, bool verbose) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_sweep(cfg, worker_count());
  const auto rows = aggregate(records, cfg.measurement == Measurement::ReturnPerEpisode ? "all" : "final");
  if (verbose) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  %s sweep: %zu runs in %.1f s\n", std::string(to_string(cfg.experiment)).c_str(), records.size(), secs);
    print_table(rows);
  }
  return rows;
}

Verdict offpolicy_reproduction(bool verbose) {
  auto cfg = ExperimentConfig::defaults(Experiment::GridworldOffpolicy);
  cfg.algorithms = {{Variant::ExpectedSarsa, 1, -1.0},
                    {Variant::CvSarsa, 2, -1.0},
                    {Variant::ExpectedSarsa, 4, -1.0},
                    {Variant::CvSarsa, 4, -1.0}};
  cfg.runs = 200;
  cfg.episodes = 200;
  const auto idx = index_rows(sweep(cfg, verbose));

  bool never_worse = true;
  std::size_t separated = 0;
  std::string four_step_misses;
  for (double alpha : cfg.alpha_grid) {
    const auto& es1 = idx.at({key(Variant::ExpectedSarsa, 1), alpha});
    const auto& cv2 = idx.at({key(Variant::CvSarsa, 2), alpha});
    if (cv2.mean > es1.mean) never_worse = false;
    if (es1.mean - cv2.mean >= std::hypot(es1.std_error, cv2.std_error)) ++separated;
    if (alpha >= 0.3) {
      const auto& es4 = idx.at({key(Variant::ExpectedSarsa, 4), alpha});
      const auto& cv4 = idx.at({key(Variant::CvSarsa, 4), alpha});
      if (!(es4.mean > cv4.mean)) four_step_misses += fmt(" %.2f", alpha);
    }
  }
  const bool majority = 2 * separated > cfg.alpha_grid.size();
  std::ostringstream detail;
  detail << "(a) cv2 <= es1 everywhere: " << (never_worse ? "yes" : "no") << ", separated at " << separated << "/"
         << cfg.alpha_grid.size() << "; (b) es4 > cv4 for alpha >= 0.3: "
         << (four_step_misses.empty() ? "yes" : "no, fails at alpha" + four_step_misses);
  return {never_worse && majority && four_step_misses.empty(), detail.str()};
}

const AggregateRow& best_of(const std::vector<AggregateRow>& best, Variant v, std::size_t n) {
  for (const auto& r : best) {
    if (r.algorithm == to_string(v) && r.n == n) return r;
  }
  throw std::logic_error("missing row for " + key(v, n));
}

Verdict onpolicy_reproduction(bool verbose) {
  auto cfg = ExperimentConfig::defaults(Experiment::GridworldOnpolicy);
  cfg.runs = 200;
  const auto best = best_settings(sweep(cfg, verbose), false);
  std::ostringstream detail;
  bool pass = true;
  for (std::size_t n : {1, 2, 4, 8}) {
    const auto& cv = best_of(best, Variant::CvSarsa, n);
    const auto& es = best_of(best, Variant::ExpectedSarsa, n);
    const bool ok = cv.mean < es.mean;
    pass = pass && ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "n=%zu cv %.6g@%.2f vs es %.6g@%.2f%s; ", n, cv.mean, cv.alpha, es.mean, es.alpha,
                  ok ? "" : " (not lower)");
    detail << buf;
  }
  return {pass, detail.str()};
}

Verdict mountain_car_reproduction(bool verbose) {
  auto cfg = ExperimentConfig::defaults(Experiment::MountainCar);
  cfg.runs = 50;
  cfg.episodes = 100;
  const auto best = best_settings(sweep(cfg, verbose), true);
  const AggregateRow* top_cv = nullptr;
  const AggregateRow* top_es = nullptr;
  for (const auto& r : best) {
    const AggregateRow*& slot = r.algorithm == "cv_sarsa" ? top_cv : top_es;
    if (slot == nullptr || r.mean > slot->mean) slot = &r;
  }
  if (top_cv == nullptr || top_es == nullptr) return {false, "missing algorithm rows"};
  const bool pass = top_cv->mean + top_cv->std_error >= top_es->mean;
  char buf[200];
  std::snprintf(buf, sizeof buf, "cv n=%zu alpha=%.2f mean %.6g (se %.3g) vs es n=%zu alpha=%.2f mean %.6g", top_cv->n,
                top_cv->alpha, top_cv->mean, top_cv->std_error, top_es->n, top_es->alpha, top_es->mean);
  return {pass, buf};
}

Verdict harness_determinism() {
  auto cfg = ExperimentConfig::defaults(Experiment::GridworldOffpolicy);
  cfg.algorithms = {{Variant::ExpectedSarsa, 1, -1.0}, {Variant::CvSarsa, 2, -1.0}};
  cfg.alpha_grid = {0.1, 0.5, 1.0};
  cfg.runs = 20;
  cfg.episodes = 20;
  cfg.base_seed = 2024;
  const auto dir = std::filesystem::temp_directory_path();
  const auto one = dir / "pdcv_acceptance_w1.csv";
  const auto eight = dir / "pdcv_acceptance_w8.csv";
  emit_csv(aggregate(run_sweep(cfg, 1)), one);
  emit_csv(aggregate(run_sweep(cfg, 8)), eight);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string a = slurp(one), b = slurp(eight);
  std::filesystem::remove(one);
  std::filesystem::remove(eight);
  return {!a.empty() && a == b, a == b ? std::to_string(a.size()) + " identical bytes" : "outputs differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  bool include_long = false;
  bool verbose = false;
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 11));
  app.add_flag("--long", include_long, "Include the mountain-car criterion");
  app.add_flag("-v,--verbose", verbose, "Print sweep tables");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, zero_mean_correction},
      {2, oracle_equivalence},
      {3, one_step_collapse},
      {4, exact_q_collapse},
      {5, lambda_identities},
      {6, tree_backup_dual_form},
      {7, oracle_quality},
      {8, [&] { return offpolicy_reproduction(verbose); }},
      {9, [&] { return onpolicy_reproduction(verbose); }},
      {10, [&] { return mountain_car_reproduction(verbose); }},
      {11, harness_determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const auto& [id, check] : criteria) {
    if (selected.empty() ? (id == 10 && !include_long) : !selected.contains(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%.1f s) %s\n", id, v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
