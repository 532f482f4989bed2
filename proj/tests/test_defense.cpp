#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sera/defense.hpp"
#include "sera/encoders.hpp"
#include "sera/generators.hpp"
#include "sera/graph.hpp"
#include "sera/linalg.hpp"
#include "sera/matrix.hpp"
#include "sera/rng.hpp"

using namespace sera;

namespace {

NagConfig nag_cfg(double sigma) {
  NagConfig c;
  c.mode = EncodeMode::NAG;
  c.sigma = sigma;
  return c;
}

EncoderWeights unit_weights(ArchKind arch, uint32_t d, uint32_t L) {
  return init_weights(arch, d, L, InitScheme::IDENTITY, 0);
}

}  // namespace

TEST_CASE("nag_bound spot values from the closed form") {
  // identity layers: sum of squared operator norms = L; the guarantee is
  // 1 - sqrt(1 - exp(-c L / sigma^2))
  const PrivacyBound one = nag_bound(unit_weights(ArchKind::GCN, 16, 1), 1.0);
  CHECK(one.opnorm_sq == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(one.sensitivity_c == 1.0);
  CHECK(one.bound == doctest::Approx(1.0 - std::sqrt(1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(one.bound == doctest::Approx(0.2049399024).epsilon(1e-9));
  CHECK_FALSE(one.vacuous);

  const PrivacyBound two = nag_bound(unit_weights(ArchKind::GCN, 16, 2), 1.0);
  CHECK(two.opnorm_sq == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(two.bound == doctest::Approx(0.0701265050).epsilon(1e-9));
}

TEST_CASE("nag_bound sensitivity constant follows the aggregator") {
  for (ArchKind a : {ArchKind::GCN, ArchKind::MEAN_SAGE, ArchKind::GIN})
    CHECK(nag_bound(unit_weights(a, 8, 1), 1.0).sensitivity_c == 1.0);
  for (ArchKind a : {ArchKind::MAX_SAGE, ArchKind::GAT})
    CHECK(nag_bound(unit_weights(a, 8, 1), 1.0).sensitivity_c == 4.0);

  // two-sided aggregators pay exp(-4 .../...): a strictly weaker guarantee
  CHECK(nag_bound(unit_weights(ArchKind::MAX_SAGE, 8, 1), 1.0).bound <
        nag_bound(unit_weights(ArchKind::GIN, 8, 1), 1.0).bound);
}

TEST_CASE("nag_bound excludes the projection and sums true operator norms") {
  EncoderWeights w = init_weights(ArchKind::GCN, 6, 2, InitScheme::HE, 3, 12);
  REQUIRE_FALSE(w.input_proj.empty());
  double want = 0;
  for (const DenseMatrix& layer : w.layers) {
    const double s = operator_norm(layer);
    want += s * s;
  }
  const PrivacyBound b = nag_bound(w, 0.8);
  CHECK(b.opnorm_sq == doctest::Approx(want).epsilon(1e-9));

  // making the projection huge must not move the bound
  for (double& v : w.input_proj.data()) v *= 1000;
  CHECK(nag_bound(w, 0.8).opnorm_sq == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("nag_bound edge cases") {
  CHECK_THROWS_AS((void)nag_bound(unit_weights(ArchKind::LINEAR, 8, 1), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)nag_bound(unit_weights(ArchKind::GCN, 8, 1), -0.5),
                  std::invalid_argument);

  const PrivacyBound no_noise = nag_bound(unit_weights(ArchKind::GCN, 8, 1), 0.0);
  CHECK(no_noise.vacuous);
  CHECK(no_noise.bound == 0.0);

  // monotone: more noise, stronger guarantee
  double prev = -1;
  for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
    const double b = nag_bound(unit_weights(ArchKind::GCN, 8, 1), sigma).bound;
    CHECK(b > prev);
    prev = b;
  }
  CHECK(prev < 1.0);
}

TEST_CASE("edge_rr_bound spot values and monotonicity") {
  CHECK(edge_rr_bound(0.0) == 1.0);  // exact: 1 - sqrt(1 - e^0) = 1
  CHECK(edge_rr_bound(std::log(3.0)) ==
        doctest::Approx(1.0 - std::sqrt(1.0 - 1.0 / 3.0)).epsilon(1e-12));
  CHECK(edge_rr_bound(std::log(3.0)) == doctest::Approx(0.1835034191).epsilon(1e-9));
  CHECK(edge_rr_bound(2.0) < edge_rr_bound(std::log(3.0)));
  CHECK(edge_rr_bound(50.0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS((void)edge_rr_bound(-1.0), std::invalid_argument);
}

TEST_CASE("edge_rr flips at rate 1/(1+e^eps)") {
  const uint32_t n = 200;
  const double pairs = n * (n - 1) / 2.0;
  const Graph g = gen_er({n, 0.1}, 5);
  const double eps = std::log(3.0);
  const Graph noisy = edge_rr(g, eps, 99);

  double flips = 0;
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v)
      if (g.has_edge(u, v) != noisy.has_edge(u, v)) flips += 1;

  const double p = 1.0 / (1.0 + std::exp(eps));  // 0.25
  CHECK(std::abs(flips - pairs * p) <= 3 * std::sqrt(pairs * p * (1 - p)));
}

TEST_CASE("edge_rr is deterministic, and eps -> inf keeps the graph") {
  const Graph g = gen_er({80, 0.15}, 6);
  const Graph a = edge_rr(g, 1.0, 7);
  const Graph b = edge_rr(g, 1.0, 7);
  REQUIRE(a.num_edges() == b.num_edges());
  bool same = true;
  a.for_each_edge([&](uint32_t u, uint32_t v) { same &= b.has_edge(u, v); });
  CHECK(same);

  // at eps = 40 the flip probability is ~4e-18: nothing moves
  const Graph frozen = edge_rr(g, 40.0, 8);
  CHECK(frozen.num_edges() == g.num_edges());
  bool identical = true;
  g.for_each_edge([&](uint32_t u, uint32_t v) { identical &= frozen.has_edge(u, v); });
  CHECK(identical);
}

TEST_CASE("edge_rr at eps 0 randomizes half of everything") {
  // eps = 0 keeps each pair with probability 1/2: the output density should
  // sit near 1/2 no matter the input
  const Graph empty_in(150);
  const Graph out = edge_rr(empty_in, 0.0, 11);
  const double pairs = 150.0 * 149 / 2;
  CHECK(std::abs(out.num_edges() - pairs / 2) <= 3 * std::sqrt(pairs * 0.25));
}

TEST_CASE("edge_rr refuses oversized graphs") {
  CHECK_THROWS_AS((void)edge_rr(Graph(20001), 1.0, 1), std::invalid_argument);
}

TEST_CASE("empirical_edge_error tracks the noise level") {
  const Graph g = gen_er({30, 0.15}, 40);
  const DenseMatrix x = gen_features(30, 16, 41);
  EncoderWeights w = init_weights(ArchKind::GCN, 16, 1, InitScheme::HE, 42);
  SpectralNormalizer norm(43);
  norm.normalize(0, w.layers[0]);

  // nearly noiseless: the worlds with and without the edge separate well,
  // so the best attacker's total error stays small
  const double quiet = empirical_edge_error(g, 3, 7, x, w, nag_cfg(1e-3),
                                            SimilarityKind::COS, 200, 44);
  // heavy noise: the worlds are nearly indistinguishable
  const double loud = empirical_edge_error(g, 3, 7, x, w, nag_cfg(25.0),
                                           SimilarityKind::COS, 200, 44);
  CHECK(quiet >= 0.0);
  CHECK(loud <= 1.0);
  CHECK(quiet < 0.35);
  CHECK(loud > 0.75);
  CHECK(loud > quiet);

  // and it is reproducible
  const double again = empirical_edge_error(g, 3, 7, x, w, nag_cfg(25.0),
                                            SimilarityKind::COS, 200, 44);
  CHECK(again == loud);
}

TEST_CASE("empirical_edge_error stays above the closed-form guarantee") {
  // one modest configuration; the acceptance gate runs the full protocol
  const Graph g = gen_er({25, 0.2}, 50);
  const DenseMatrix x = gen_features(25, 12, 51);
  EncoderWeights w = init_weights(ArchKind::MEAN_SAGE, 12, 1, InitScheme::HE, 52);
  SpectralNormalizer norm(53);
  norm.normalize(0, w.layers[0]);

  const double sigma = 1.0;
  const PrivacyBound pb = nag_bound(w, sigma);
  const double est = empirical_edge_error(g, 2, 9, x, w, nag_cfg(sigma),
                                          SimilarityKind::COS, 400, 54);
  // Monte-Carlo slack: 400 trials resolve the error to a few percent
  CHECK(est >= pb.bound - 0.08);
}
