#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dhams/analysis.hpp"
#include "dhams/core.hpp"
#include "dhams/rng.hpp"
#include "dhams/targets/gaussian.hpp"
#include "dhams/targets/mixture.hpp"
#include "test_helpers.hpp"

using dhams::ChainMatrix;
using dhams::ContractError;
using dhams::LatticeSpec;
using dhams::MarginalTable;
using dhams::Mat;
using dhams::RngStream;
using dhams::TargetModel;
using dhams::Vec;

namespace {

ChainMatrix make_chains(const std::vector<Mat>& states) {
  ChainMatrix out;
  for (const Mat& st : states) {
    out.states.push_back(st);
    out.f_trace.push_back(Vec::Zero(st.rows()));
    out.accepted.emplace_back(static_cast<std::size_t>(st.rows()), 1);
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

// ---------------------------------------------------------------------------
// MarginalTable and exact enumeration

TEST_CASE("marginal table validates its cells") {
  Vec good(2);
  good << 0.25, 0.75;
  const MarginalTable t({0}, 2, good);
  REQUIRE(t.size() == 2);
  REQUIRE(t.prob(1) == 0.75);
  REQUIRE(t.cell_index({1}) == 1);

  Vec bad(2);
  bad << 0.5, 0.4;
  REQUIRE_THROWS_AS(MarginalTable({0}, 2, bad), ContractError);
  bad << -0.1, 1.1;
  REQUIRE_THROWS_AS(MarginalTable({0}, 2, bad), ContractError);
  REQUIRE_THROWS_AS(MarginalTable({}, 2, good), ContractError);
  REQUIRE_THROWS_AS(MarginalTable({0, 1}, 2, good), ContractError);

  Vec four(4);
  four << 0.1, 0.2, 0.3, 0.4;
  const MarginalTable t2({0, 1}, 2, four);
  REQUIRE(t2.cell_index({0, 1}) == 1);  // last listed coordinate fastest
  REQUIRE(t2.cell_index({1, 0}) == 2);
  REQUIRE_THROWS_AS(t2.cell_index({2, 0}), ContractError);
  REQUIRE_THROWS_AS(t2.cell_index({0}), ContractError);
}

TEST_CASE("exact joint: uniform square, log-linear line, symmetric Gaussian") {
  {
    const auto target =
        dhams::linear_product(Vec::Zero(2), LatticeSpec::binary(2));
    const auto joint = dhams::exact_joint(target);
    REQUIRE(joint.size() == 4);
    for (long c = 0; c < 4; ++c)
      REQUIRE(std::abs(joint.prob(c) - 0.25) < 1e-14);
  }
  {
    Vec a(1);
    a << std::log(3.0);
    const auto target = dhams::linear_product(a, LatticeSpec::binary(1));
    const auto joint = dhams::exact_joint(target);
    REQUIRE(std::abs(joint.prob(0) - 0.25) < 1e-14);
    REQUIRE(std::abs(joint.prob(1) - 0.75) < 1e-14);
  }
  {
    dhams::EquiCorrGaussianSpec spec;
    spec.d = 2;
    spec.k = 1;
    spec.sigma = 1.5;
    spec.rho = 0.5;
    const auto target = dhams::discrete_gaussian(spec);
    const auto joint = dhams::exact_joint(target);
    const int K = 3;
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j)
        REQUIRE(std::abs(joint.prob(joint.cell_index({i, j})) -
                         joint.prob(joint.cell_index({K - 1 - i, K - 1 - j}))) <
                1e-12);
  }
  {
    const TargetModel degenerate(
        "all_minus_inf", LatticeSpec::binary(1),
        [](const Vec&) { return -std::numeric_limits<double>::infinity(); },
        [](const Vec& s) { return Vec::Zero(s.size()); });
    REQUIRE_THROWS_AS(dhams::exact_joint(degenerate), ContractError);
  }
}

TEST_CASE("marginalize: hand table, identity, order, and mass conservation") {
  Vec a(2);
  a << std::log(3.0), 0.0;
  const auto target = dhams::linear_product(a, LatticeSpec::binary(2));
  const auto joint = dhams::exact_joint(target);
  // Cells (s0, s1) with s1 fastest: weights {1, 1, 3, 3} / 8.
  REQUIRE(std::abs(joint.prob(0) - 0.125) < 1e-14);
  REQUIRE(std::abs(joint.prob(2) - 0.375) < 1e-14);

  const auto m0 = dhams::marginalize(joint, {0});
  REQUIRE(std::abs(m0.prob(0) - 0.25) < 1e-14);
  REQUIRE(std::abs(m0.prob(1) - 0.75) < 1e-14);
  const auto m1 = dhams::marginalize(joint, {1});
  REQUIRE(std::abs(m1.prob(0) - 0.5) < 1e-14);

  const auto ident = dhams::marginalize(joint, {0, 1});
  for (long c = 0; c < 4; ++c)
    REQUIRE(ident.prob(c) == joint.prob(c));

  const auto swapped = dhams::marginalize(joint, {1, 0});
  REQUIRE(std::abs(swapped.prob(0) - 0.125) < 1e-14);  // (s1=0, s0=0)
  REQUIRE(std::abs(swapped.prob(1) - 0.375) < 1e-14);  // (s1=0, s0=1)

  REQUIRE_THROWS_AS(dhams::marginalize(joint, {2}), ContractError);

  dhams::EquiCorrGaussianSpec spec;
  spec.d = 3;
  spec.k = 1;
  spec.sigma = 1.2;
  spec.rho = 0.3;
  const auto gjoint = dhams::exact_joint(dhams::discrete_gaussian(spec));
  const auto pair = dhams::marginalize(gjoint, {0, 2});
  REQUIRE(std::abs(pair.probs().sum() - 1.0) < 1e-12);
}

TEST_CASE("empirical marginals count cells, respect draw limits, pool chains") {
  const LatticeSpec lat = LatticeSpec::binary(2);
  Mat chain(4, 2);
  chain << 0, 0, 1, 1, 1, 0, 1, 0;

  const auto full = dhams::empirical_marginal(chain, -1, {0, 1}, lat);
  REQUIRE(full.prob(0) == 0.25);
  REQUIRE(full.prob(3) == 0.25);
  REQUIRE(full.prob(2) == 0.5);

  const auto first_two = dhams::empirical_marginal(chain, 2, {0, 1}, lat);
  REQUIRE(first_two.prob(0) == 0.5);
  REQUIRE(first_two.prob(3) == 0.5);
  REQUIRE(first_two.prob(2) == 0.0);

  REQUIRE_THROWS_AS(dhams::empirical_marginal(chain, 0, {0, 1}, lat),
                    ContractError);

  const auto coord1 = dhams::empirical_marginal(chain, -1, {1}, lat);
  REQUIRE(coord1.prob(1) == 0.25);

  Mat other(4, 2);
  other << 0, 1, 0, 1, 0, 1, 0, 1;
  const auto chains = make_chains({chain, other});
  const auto pooled = dhams::empirical_marginal(chains, {0}, lat);
  REQUIRE(pooled.prob(1) == 0.375);  // 3 of 8 rows have s0 = 1
}

TEST_CASE("tv distance: hand values, bounds, and metric behavior") {
  auto table = [](std::initializer_list<double> probs) {
    Vec v(static_cast<long>(probs.size()));
    long i = 0;
    for (double p : probs) v[i++] = p;
    return MarginalTable({0}, static_cast<int>(probs.size()), v);
  };
  REQUIRE(dhams::tv_distance(table({0.25, 0.75}), table({0.25, 0.75})) == 0.0);
  REQUIRE(dhams::tv_distance(table({1.0, 0.0}), table({0.0, 1.0})) == 1.0);
  REQUIRE(std::abs(dhams::tv_distance(table({0.2, 0.3, 0.5}),
                                      table({0.3, 0.3, 0.4})) -
                   0.1) < 1e-15);

  Vec two(2);
  two << 0.5, 0.5;
  const MarginalTable other_coord({1}, 2, two);
  REQUIRE_THROWS_AS(dhams::tv_distance(table({0.5, 0.5}), other_coord),
                    ContractError);
  Vec three = Vec::Constant(3, 1.0 / 3.0);
  REQUIRE_THROWS_AS(
      dhams::tv_distance(table({0.5, 0.5}), MarginalTable({0}, 3, three)),
      ContractError);

  RngStream rng(61, 0);
  for (int t = 0; t < 40; ++t) {
    const auto pv = testing_oracles::random_probs(4, rng);
    const auto qv = testing_oracles::random_probs(4, rng);
    const auto rv = testing_oracles::random_probs(4, rng);
    auto wrap = [](const std::vector<double>& v) {
      return MarginalTable({0}, 4, Eigen::Map<const Vec>(v.data(), 4));
    };
    const double pq = dhams::tv_distance(wrap(pv), wrap(qv));
    const double qp = dhams::tv_distance(wrap(qv), wrap(pv));
    REQUIRE(pq == qp);
    REQUIRE(pq >= 0.0);
    REQUIRE(pq <= 1.0);
    REQUIRE(dhams::tv_distance(wrap(pv), wrap(rv)) <=
            pq + dhams::tv_distance(wrap(qv), wrap(rv)) + 1e-15);
  }
}

// ---------------------------------------------------------------------------
// Scalar diagnostics

TEST_CASE("multi-chain ess: hand value, sentinels, invariance, validation") {
  Mat x(2, 2);
  x << 1, 2, 2, 4;
  REQUIRE(std::abs(dhams::ess_multichain(x) - 10.0 / 9.0) < 1e-12);

  Mat frozen(2, 2);
  frozen << 0, 0, 1, 1;
  REQUIRE(dhams::ess_multichain(frozen) == 0.0);

  Mat mirrored(2, 2);
  mirrored << 0, 1, 1, 0;
  REQUIRE(dhams::ess_multichain(mirrored) ==
          std::numeric_limits<double>::infinity());

  RngStream rng(62, 0);
  Mat y(4, 50);
  for (int m = 0; m < 4; ++m)
    for (int t = 0; t < 50; ++t) y(m, t) = rng.normal() + 0.3 * m;
  const double base = dhams::ess_multichain(y);
  const Mat transformed = (2.5 * y.array() - 7.0).matrix();
  REQUIRE(std::abs(base - dhams::ess_multichain(transformed)) < 1e-10 * base);

  Mat onechain(1, 5), onedraw(3, 1);
  onechain.setZero();
  onedraw.setZero();
  REQUIRE_THROWS_AS(dhams::ess_multichain(onechain), ContractError);
  REQUIRE_THROWS_AS(dhams::ess_multichain(onedraw), ContractError);
}

TEST_CASE("acceptance rate and average flips over explicit chains") {
  Mat walk(3, 2);
  walk << 0, 0, 1, 0, 1, 1;
  ChainMatrix chains = make_chains({walk});
  chains.accepted[0] = {1, 1, 0};
  REQUIRE(std::abs(dhams::acceptance_rate(chains) - 2.0 / 3.0) < 1e-15);
  REQUIRE(dhams::average_flips(chains) == 1.0);

  Mat still(3, 2);
  still.setOnes();
  const auto frozen = make_chains({still});
  REQUIRE(dhams::average_flips(frozen) == 0.0);
  REQUIRE(dhams::acceptance_rate(frozen) == 1.0);

  Mat single(1, 2);
  single.setZero();
  REQUIRE_THROWS_AS(dhams::average_flips(make_chains({single})),
                    ContractError);

  const auto both = make_chains({walk, still});
  REQUIRE(dhams::average_flips(both) == 0.5);  // (2 + 0) flips over 4 steps
}

TEST_CASE("posterior inclusion probabilities") {
  Mat ones(3, 2);
  ones.setOnes();
  const auto all_in = make_chains({ones});
  REQUIRE((dhams::pip_estimates(all_in).array() == 1.0).all());

  Mat column(4, 1);
  column << 1, 0, 1, 1;
  REQUIRE(dhams::pip_estimates(make_chains({column}))[0] == 0.75);
  REQUIRE(dhams::pip_single_chain(column)[0] == 0.75);

  Mat zeros(4, 1);
  zeros.setZero();
  const auto split = make_chains({column, zeros});
  REQUIRE(dhams::pip_estimates(split)[0] == 0.375);
  const Mat per = dhams::pip_per_chain(split);
  REQUIRE(per.rows() == 2);
  REQUIRE(per(0, 0) == 0.75);
  REQUIRE(per(1, 0) == 0.0);

  Mat bad(2, 1);
  bad << 0, 2;
  REQUIRE_THROWS_AS(dhams::pip_estimates(make_chains({bad})), ContractError);
}

TEST_CASE("autocorrelation: exact lag facts and iid behavior") {
  Vec alternating(10);
  for (int i = 0; i < 10; ++i) alternating[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const Vec acf = dhams::autocorrelation(alternating, 2);
  REQUIRE(std::abs(acf[0] - 1.0) < 1e-15);
  REQUIRE(std::abs(acf[1] - (-0.9)) < 1e-15);  // -(T-1)/T at T = 10

  RngStream rng(63, 0);
  Vec iid(10000);
  for (long i = 0; i < iid.size(); ++i) iid[i] = rng.normal();
  const Vec a2 = dhams::autocorrelation(iid, 1);
  REQUIRE(std::abs(a2[1]) < 4.0 / std::sqrt(10000.0));

  Vec flat = Vec::Constant(5, 2.0);
  REQUIRE_THROWS_AS(dhams::autocorrelation(flat, 1), ContractError);
  REQUIRE_THROWS_AS(dhams::autocorrelation(iid, -1), ContractError);
  REQUIRE_THROWS_AS(dhams::autocorrelation(alternating, 10), ContractError);
}

TEST_CASE("batch-means standard error") {
  Vec tiny(4);
  tiny << 0, 1, 2, 3;
  REQUIRE(dhams::batch_means_se(tiny, 2) == 1.0);

  RngStream rng(64, 0);
  Vec iid(20000);
  for (long i = 0; i < iid.size(); ++i) iid[i] = rng.normal();
  const double se = dhams::batch_means_se(iid, 100);
  const double want = 1.0 / std::sqrt(20000.0);
  REQUIRE(se > 0.5 * want);
  REQUIRE(se < 1.5 * want);

  REQUIRE_THROWS_AS(dhams::batch_means_se(tiny, 3), ContractError);
  REQUIRE_THROWS_AS(dhams::batch_means_se(tiny, 0), ContractError);
}

// ---------------------------------------------------------------------------
// TV curve and per-coordinate ESS

TEST_CASE("tv curve matches a manual assembly and validates draw counts") {
  const auto target =
      dhams::linear_product(Vec::Zero(2), LatticeSpec::binary(2));
  const auto& lat = target.lattice();
  Mat c1(4, 2), c2(4, 2);
  c1 << 0, 0, 0, 1, 1, 0, 1, 1;
  c2 << 1, 1, 1, 1, 0, 0, 0, 1;
  const auto chains = make_chains({c1, c2});

  const std::vector<std::vector<int>> subsets = {{0}, {1}};
  const std::vector<long> counts = {2, 4};
  const auto curve = dhams::tv_curve(chains, target, subsets, counts);
  REQUIRE(curve.size() == 2);
  const auto joint = dhams::exact_joint(target);
  for (std::size_t p = 0; p < curve.size(); ++p) {
    REQUIRE(curve[p].draw_count == counts[p]);
    std::vector<double> per_chain;
    for (const Mat& st : {c1, c2}) {
      double acc = 0.0;
      for (const auto& sub : subsets)
        acc += dhams::tv_distance(
            dhams::marginalize(joint, sub),
            dhams::empirical_marginal(st, counts[p], sub, lat));
      per_chain.push_back(acc / 2.0);
    }
    const double mean = 0.5 * (per_chain[0] + per_chain[1]);
    const double sd = std::sqrt((per_chain[0] - mean) * (per_chain[0] - mean) +
                                (per_chain[1] - mean) * (per_chain[1] - mean));
    REQUIRE(std::abs(curve[p].mean_tv - mean) < 1e-14);
    REQUIRE(std::abs(curve[p].sd_tv - sd) < 1e-14);
  }

  REQUIRE_THROWS_AS(dhams::tv_curve(chains, target, subsets, {0}),
                    ContractError);
  REQUIRE_THROWS_AS(dhams::tv_curve(chains, target, subsets, {5}),
                    ContractError);

  const auto defaults = dhams::tv_curve(chains, target, {}, {});
  REQUIRE(defaults.size() == 1);
  REQUIRE(defaults[0].draw_count == 4);
}

TEST_CASE("per-coordinate ess mirrors the direct assembly") {
  Mat c1(4, 2), c2(4, 2);
  c1 << 1, 0, 2, 1, 1, 0, 3, 1;
  c2 << 0, 1, 1, 0, 2, 2, 0, 1;
  ChainMatrix chains = make_chains({c1, c2});
  chains.f_trace[0] = Vec::LinSpaced(4, 0.0, 3.0);
  chains.f_trace[1] = Vec::LinSpaced(4, 1.0, -2.0);

  const auto [per_coord, energy] = dhams::ess_per_coordinate(chains);
  REQUIRE(per_coord.size() == 2);
  for (int i = 0; i < 2; ++i) {
    Mat x(2, 4);
    x.row(0) = c1.col(i).transpose();
    x.row(1) = c2.col(i).transpose();
    REQUIRE(std::abs(per_coord[i] - dhams::ess_multichain(x)) < 1e-13);
  }
  Mat fx(2, 4);
  fx.row(0) = chains.f_trace[0].transpose();
  fx.row(1) = chains.f_trace[1].transpose();
  REQUIRE(std::abs(energy - dhams::ess_multichain(fx)) < 1e-13);
}

// ---------------------------------------------------------------------------
// Tuning

TEST_CASE("stepsize search core: deterministic updates and best-pick rule") {
  std::vector<std::pair<double, double>> trace;
  const double up = dhams::tune_stepsize_core(
      0.5, 0.3, 1.0, 4, [](double) { return 1.0; }, &trace);
  REQUIRE(trace.size() == 4);
  REQUIRE(trace[0].first == 0.5);
  REQUIRE(std::abs(trace[1].first - 0.5 * std::exp(1.0)) < 1e-12);
  REQUIRE(up == 0.5);  // every probe equally bad; the first wins

  trace.clear();
  const double down = dhams::tune_stepsize_core(
      0.5, 0.3, 1.0, 4, [](double) { return 0.0; }, &trace);
  REQUIRE(std::abs(trace[1].first - 0.5 * std::exp(-1.0)) < 1e-12);
  REQUIRE(down == 0.5);

  const double found = dhams::tune_stepsize_core(
      0.3, 0.5, 0.6, 40, [](double d) { return 1.0 / (1.0 + d); });
  REQUIRE(std::abs(found - 1.0) < 0.1);

  auto flat = [](double) { return 0.5; };
  REQUIRE_THROWS_AS(dhams::tune_stepsize_core(0.5, 0.0, 1.0, 4, flat),
                    ContractError);
  REQUIRE_THROWS_AS(dhams::tune_stepsize_core(0.5, 1.0, 1.0, 4, flat),
                    ContractError);
  REQUIRE_THROWS_AS(dhams::tune_stepsize_core(0.0, 0.5, 1.0, 4, flat),
                    ContractError);
  REQUIRE_THROWS_AS(dhams::tune_stepsize_core(0.5, 0.5, 1.0, 0, flat),
                    ContractError);
  REQUIRE_THROWS_AS(dhams::tune_stepsize_core(0.5, 0.5, 0.0, 4, flat),
                    ContractError);
}

TEST_CASE("stepsize tuner: window kernels refuse, softmax kernels run") {
  dhams::EquiCorrGaussianSpec spec;
  spec.d = 2;
  spec.k = 1;
  spec.sigma = 1.5;
  spec.rho = 0.5;
  const auto target = dhams::discrete_gaussian(spec);
  RngStream rng(65, 0);
  REQUIRE_THROWS_AS(
      dhams::tune_stepsize_target_acceptance(dhams::SamplerKind::kMetropolis,
                                             target, 1.0, 0.5, 0.6, 3, 50, rng),
      ContractError);
  REQUIRE_THROWS_AS(
      dhams::tune_stepsize_target_acceptance(dhams::SamplerKind::kOrdinalGwg,
                                             target, 1.0, 0.5, 0.6, 3, 50, rng),
      ContractError);
  std::vector<std::pair<double, double>> trace;
  const double delta = dhams::tune_stepsize_target_acceptance(
      dhams::SamplerKind::kNcg, target, 1.0, 0.55, 0.6, 3, 50, rng,
      dhams::SamplerParams{}, &trace);
  REQUIRE(delta > 0.0);
  REQUIRE(trace.size() == 3);
  for (const auto& [d, alpha] : trace) {
    REQUIRE(d > 0.0);
    REQUIRE(alpha >= 0.0);
    REQUIRE(alpha <= 1.0);
  }
}

TEST_CASE("two-stage grid search core") {
  {
    int calls = 0;
    const auto [d, p] = dhams::tune_dhams_core(
        {0.5}, {0.3}, [&](double delta, double phi) {
          ++calls;
          REQUIRE(delta == 0.5);
          REQUIRE((phi == 0.0 || phi == 0.3));
          return 1.0;
        });
    REQUIRE(d == 0.5);
    REQUIRE(p == 0.3);
    REQUIRE(calls == 2);
  }
  {
    const std::vector<double> dg = {0.1, 0.4, 0.7, 1.0, 1.3};
    const std::vector<double> pg = {0.0, 0.1, 0.2, 0.3};
    const auto [d, p] =
        dhams::tune_dhams_core(dg, pg, [](double delta, double phi) {
          return -(delta - 0.7) * (delta - 0.7) - (phi - 0.2) * (phi - 0.2);
        });
    REQUIRE(d == 0.7);
    REQUIRE(p == 0.2);
  }
  REQUIRE_THROWS_AS(
      dhams::tune_dhams_core({}, {0.0}, [](double, double) { return 0.0; }),
      ContractError);
  REQUIRE_THROWS_AS(
      dhams::tune_dhams_core({0.5}, {}, [](double, double) { return 0.0; }),
      ContractError);
}

TEST_CASE("dhams grid tuner runs both kernels on a small target") {
  dhams::EquiCorrGaussianSpec spec;
  spec.d = 2;
  spec.k = 1;
  spec.sigma = 1.5;
  spec.rho = 0.5;
  const auto target = dhams::discrete_gaussian(spec);
  const std::vector<double> dg = {0.8, 1.2};
  const std::vector<double> pg = {0.0, 0.5};
  dhams::TuneDhamsOptions opts;
  opts.chains = 2;
  opts.n_burn = 50;
  opts.n_keep = 100;

  {
    RngStream rng(66, 0);
    const auto res =
        dhams::tune_dhams(target, std::nullopt, 0.5, dg, pg,
                          dhams::TuneCriterion::kEssPotential, rng, opts);
    REQUIRE((res.params.delta == 0.8 || res.params.delta == 1.2));
    REQUIRE((res.params.phi == 0.0 || res.params.phi == 0.5));
    REQUIRE(res.params.epsilon == 0.5);
    REQUIRE(res.trace.size() >= 3);
    REQUIRE(res.trace[0].params.phi == 0.0);  // stage 1 scans delta at phi = 0
    REQUIRE(res.trace[1].params.phi == 0.0);
    REQUIRE(std::isfinite(res.criterion));
  }
  {
    RngStream rng(67, 0);
    const auto res =
        dhams::tune_dhams(target, std::optional<double>(0.4), 0.5, dg, pg,
                          dhams::TuneCriterion::kAverageFlips, rng, opts);
    REQUIRE(res.params.beta == 0.4);
    REQUIRE(res.criterion >= 0.0);
  }
  {
    RngStream rng(68, 0);
    dhams::TuneDhamsOptions bad = opts;
    bad.chains = 1;
    REQUIRE_THROWS_AS(
        dhams::tune_dhams(target, std::nullopt, 0.5, dg, pg,
                          dhams::TuneCriterion::kEssPotential, rng, bad),
        ContractError);
  }
}

// ---------------------------------------------------------------------------
// CSV emitters

TEST_CASE("seventeen-digit formatting round-trips doubles bitwise") {
  REQUIRE(dhams::format_sig17(0.1) == "0.10000000000000001");
  REQUIRE(dhams::format_sig17(0.25) == "0.25");
  const double vals[] = {1.0 / 3.0,       0.1,   1e-300, 12345.678901234567,
                         2.220446049e-16, 0.0,   -1.5,   1.0e17,
                         9.87654321e8,    -0.75, 3.5e-5, 2.0};
  for (const double v : vals) {
    const double back = std::stod(dhams::format_sig17(v));
    REQUIRE(back == v);
  }
}

TEST_CASE("csv writers emit the documented schemas") {
  {
    const auto path = temp_path("dhams_tv_curve_test.csv");
    dhams::write_tv_curve_csv(
        path, {dhams::TvCurvePoint{5, 0.25, 0.0},
               dhams::TvCurvePoint{10, 0.125, 0.0625}});
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 3);
    REQUIRE(lines[0] == "draw_count,mean_tv,sd_tv");
    REQUIRE(lines[1] == "5,0.25,0");
    REQUIRE(lines[2] == "10,0.125,0.0625");
    std::filesystem::remove(path);
  }
  {
    const auto path = temp_path("dhams_ess_test.csv");
    Vec per(2);
    per << 100.0, 1.0 / 3.0;
    dhams::write_ess_csv(path, per, 50.5);
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 4);
    REQUIRE(lines[0] == "coordinate,ess");
    REQUIRE(lines[1] == "s_1,100");
    REQUIRE(lines[2] == "s_2,0.33333333333333331");
    REQUIRE(lines[3] == "energy,50.5");
    std::filesystem::remove(path);
  }
  {
    const auto path = temp_path("dhams_pip_test.csv");
    Vec mean(2), sd(2);
    mean << 0.75, 0.5;
    sd << 0.0, 0.25;
    dhams::write_pip_csv(path, mean, sd);
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 3);
    REQUIRE(lines[0] == "coordinate,mean_pip,sd_pip");
    REQUIRE(lines[1] == "s_1,0.75,0");
    REQUIRE(lines[2] == "s_2,0.5,0.25");
    Vec shorter(1);
    shorter << 0.5;
    REQUIRE_THROWS_AS(dhams::write_pip_csv(path, mean, shorter),
                      ContractError);
    std::filesystem::remove(path);
  }
  {
    const auto path = temp_path("dhams_tuning_test.csv");
    dhams::SamplerParams p;
    p.delta = 0.5;
    p.epsilon = 0.9;
    p.phi = 0.25;
    p.beta = -0.5;
    dhams::write_tuning_csv(path, {dhams::TuneRecord{p, 321.0}});
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 2);
    REQUIRE(lines[0] == "params,criterion");
    REQUIRE(lines[1] == "delta=0.5;epsilon=0.9;phi=0.25;beta=-0.5,321");
    std::filesystem::remove(path);
  }
  {
    const auto path = temp_path("dhams_stepsize_test.csv");
    dhams::write_stepsize_tuning_csv(path, {{1.5, 0.625}});
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 2);
    REQUIRE(lines[0] == "params,criterion");
    REQUIRE(lines[1] == "delta=1.5,0.625");
    std::filesystem::remove(path);
  }
  REQUIRE_THROWS_AS(
      dhams::write_tv_curve_csv("/nonexistent_dir_zz/x.csv", {}),
      ContractError);
}

// ---------------------------------------------------------------------------
// ChainMatrix validation

TEST_CASE("chain matrix rejects ragged inputs") {
  ChainMatrix empty;
  REQUIRE_THROWS_AS(empty.validate(), ContractError);

  Mat a(3, 2), b(2, 2);
  a.setZero();
  b.setZero();
  auto chains = make_chains({a, b});
  REQUIRE_THROWS_AS(chains.validate(), ContractError);

  auto good = make_chains({a});
  good.validate();
  good.f_trace[0] = Vec::Zero(2);
  REQUIRE_THROWS_AS(good.validate(), ContractError);
  good.f_trace[0] = Vec::Zero(3);
  good.accepted[0].pop_back();
  REQUIRE_THROWS_AS(good.validate(), ContractError);
  good.accepted[0].push_back(1);
  good.momenta.push_back(Mat::Zero(2, 2));
  REQUIRE_THROWS_AS(good.validate(), ContractError);
  good.momenta[0] = Mat::Zero(3, 2);
  good.validate();
}
