#include <doctest.h>

#include <cmath>

#include "sdcnn/basis.hpp"
#include "sdcnn/rng.hpp"

using namespace sdcnn;
using namespace sdcnn::basis;

TEST_CASE("uniform grid over the unit box, one resolution") {
  BasisConfig config;
  config.num_resolutions = 1;
  config.margin_fraction = 0.0;
  auto resolutions = build_resolutions(config);
  REQUIRE(resolutions.size() == 1);
  const Resolution& res = resolutions[0];
  CHECK(res.rows == 3);
  CHECK(res.cols == 3);
  CHECK(res.sigma == doctest::Approx(0.75).epsilon(1e-14));
  // knots at {0, 0.5, 1}^2, row-major
  CHECK(res.knots[0].center.x1 == doctest::Approx(0.0));
  CHECK(res.knots[0].center.x2 == doctest::Approx(0.0));
  CHECK(res.knots[4].center.x1 == doctest::Approx(0.5));
  CHECK(res.knots[4].center.x2 == doctest::Approx(0.5));
  CHECK(res.knots[8].center.x1 == doctest::Approx(1.0));
  CHECK(res.knots[8].center.x2 == doctest::Approx(1.0));
}

TEST_CASE("geometric knot growth and shrinking scales") {
  BasisConfig config;
  auto resolutions = build_resolutions(config);
  REQUIRE(resolutions.size() == 3);
  CHECK(resolutions[0].rows == 3);
  CHECK(resolutions[1].rows == 6);
  CHECK(resolutions[2].rows == 12);
  for (size_t k = 0; k + 1 < resolutions.size(); ++k) {
    CHECK(resolutions[k + 1].knot_count() > resolutions[k].knot_count());
    CHECK(resolutions[k + 1].sigma < resolutions[k].sigma);
  }
}

TEST_CASE("margin expands the box on each side") {
  BasisConfig config;
  config.x1_min = -500;
  config.x1_max = 500;
  config.x2_min = -500;
  config.x2_max = 500;
  config.num_resolutions = 1;
  auto resolutions = build_resolutions(config);
  CHECK(resolutions[0].knots.front().center.x1 == doctest::Approx(-600.0));
  CHECK(resolutions[0].knots.back().center.x1 == doctest::Approx(600.0));
  CHECK(resolutions[0].knots.front().center.x2 == doctest::Approx(-600.0));
  CHECK(resolutions[0].knots.back().center.x2 == doctest::Approx(600.0));
}

TEST_CASE("knot spacing halves per level with growth factor 2") {
  BasisConfig config;
  auto resolutions = build_resolutions(config);
  auto spacing = [](const Resolution& res) {
    return res.knots[1].center.x1 - res.knots[0].center.x1;
  };
  for (size_t k = 0; k + 1 < resolutions.size(); ++k) {
    const double ratio = spacing(resolutions[k]) / spacing(resolutions[k + 1]);
    // one level down multiplies the per-axis count by the growth factor g,
    // so spacing shrinks by (g*a - 1)/(a - 1), not exactly g
    const double a = static_cast<double>(resolutions[k].rows);
    const double expected = (2.0 * a - 1.0) / (a - 1.0);
    CHECK(ratio == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("knot budget rejects oversized configurations") {
  BasisConfig config;
  config.num_resolutions = 5;  // finest would be 48x48 = 2304 <= 4096
  CHECK_NOTHROW(build_resolutions(config));
  config.num_resolutions = 6;  // finest would be 96x96 = 9216
  CHECK_THROWS_AS(build_resolutions(config), Error);
}

TEST_CASE("gaussian rbf values") {
  const Location origin{0.0, 0.0};
  CHECK(gaussian_rbf(origin, origin, 2.0) == 1.0);
  // unit exponent: distance = 2 sigma^2
  const Location c{2.0 * 1.5 * 1.5, 0.0};
  CHECK(gaussian_rbf(origin, c, 1.5) == doctest::Approx(0.3678794411714423).epsilon(1e-15));
  // printed (unsquared) form at distance 5, sigma 1
  CHECK(gaussian_rbf(origin, Location{3.0, 4.0}, 1.0) ==
        doctest::Approx(0.08208499862389879).epsilon(1e-15));
  // squared variant
  CHECK(gaussian_rbf(origin, Location{3.0, 4.0}, 1.0, true) ==
        doctest::Approx(std::exp(-12.5)).epsilon(1e-15));
}

TEST_CASE("gaussian rbf properties: range, symmetry, translation") {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Location s{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Location c{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const double sigma = rng.uniform(0.1, 3.0);
    const double v = gaussian_rbf(s, c, sigma);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(v == gaussian_rbf(c, s, sigma));
    const double dx = rng.uniform(-5, 5), dy = rng.uniform(-5, 5);
    const Location s2{s.x1 + dx, s.x2 + dy};
    const Location c2{c.x1 + dx, c.x2 + dy};
    CHECK(gaussian_rbf(s2, c2, sigma) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("wendland rbf endpoints, value and support") {
  CHECK(wendland_rbf(0.0) == 1.0);
  CHECK(wendland_rbf(1.0) == 0.0);
  CHECK(wendland_rbf(1.5) == 0.0);
  CHECK(wendland_rbf(0.5) == doctest::Approx(0.10807291666666667).epsilon(1e-15));
  // continuous at the support edge
  CHECK(wendland_rbf(1.0 - 1e-6) < 1e-30);
}

TEST_CASE("wendland rbf is monotone non-increasing") {
  double prev = wendland_rbf(0.0);
  for (int i = 1; i <= 400; ++i) {
    const double r = 1.4 * i / 400.0;
    const double v = wendland_rbf(r);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("basis image matches a per-knot reference loop bitwise") {
  BasisConfig config;
  auto resolutions = build_resolutions(config);
  const KernelSpec kernel{KernelKind::Gaussian, false};
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Location s{rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
    for (const Resolution& res : resolutions) {
      const BasisImage image = evaluate_basis_image(s, res, kernel);
      REQUIRE(image.values.dim(0) == res.rows);
      REQUIRE(image.values.dim(1) == res.cols);
      for (int r = 0; r < res.rows; ++r) {
        for (int c = 0; c < res.cols; ++c) {
          const Knot& knot = res.knots[static_cast<size_t>(r * res.cols + c)];
          CHECK(image.values.values[static_cast<size_t>(r * res.cols + c)] ==
                gaussian_rbf(s, knot.center, res.sigma));
        }
      }
    }
  }
}

TEST_CASE("basis image entries lie in [0,1]; kernel max at a knot") {
  BasisConfig config;
  auto resolutions = build_resolutions(config);
  const KernelSpec kernel{KernelKind::Gaussian, false};
  const Location at_knot = resolutions[0].knots[0].center;
  const BasisImage image = evaluate_basis_image(at_knot, resolutions[0], kernel);
  CHECK(image.values.values[0] == 1.0);
  for (size_t i = 1; i < image.values.values.size(); ++i) {
    CHECK(image.values.values[i] < 1.0);
    CHECK(image.values.values[i] > 0.0);
  }
}

TEST_CASE("wendland image vanishes far outside the expanded box") {
  BasisConfig config;
  config.kernel = KernelKind::Wendland;
  auto resolutions = build_resolutions(config);
  const KernelSpec kernel{KernelKind::Wendland, false};
  const Location far{50.0, 50.0};
  for (const Resolution& res : resolutions) {
    const BasisImage image = evaluate_basis_image(far, res, kernel);
    for (double v : image.values.values) CHECK(v == 0.0);
  }
}

TEST_CASE("basis vector is the coarsest-first concatenation of flat images") {
  BasisConfig config;
  auto resolutions = build_resolutions(config);
  const KernelSpec kernel{KernelKind::Gaussian, false};
  CHECK(total_basis_size(resolutions) == 9 + 36 + 144);

  Rng rng(11);
  const Location s{rng.uniform(0, 1), rng.uniform(0, 1)};
  const std::vector<double> vec = evaluate_basis_vector(s, resolutions, kernel);
  REQUIRE(static_cast<int64_t>(vec.size()) == 189);

  // element-by-element against an independent double loop over knots
  size_t at = 0;
  for (const Resolution& res : resolutions) {
    for (const Knot& knot : res.knots) {
      CHECK(vec[at] == gaussian_rbf(s, knot.center, res.sigma));
      ++at;
    }
  }

  // single-resolution case degenerates to one flat image
  const std::vector<Resolution> single{resolutions[0]};
  const std::vector<double> one = evaluate_basis_vector(s, single, kernel);
  const BasisImage image = evaluate_basis_image(s, resolutions[0], kernel);
  CHECK(one == image.values.values);
}
