#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "lund/errors.hpp"
#include "lund/synth.hpp"

using namespace lund;

namespace {

std::vector<std::size_t> class_counts(const PointCloud& c, std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (int l : c.labels) {
        REQUIRE(l >= 1);
        REQUIRE(static_cast<std::size_t>(l) <= k);
        ++counts[static_cast<std::size_t>(l - 1)];
    }
    return counts;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    DatasetSpec s;
    s.family = DatasetSpec::Family::bottleneck;
    s.n = 300;
    s.seed = 42;
    const PointCloud a = generate(s);
    const PointCloud b = generate(s);
    REQUIRE(a.n == b.n);
    CHECK(a.data == b.data);
    CHECK(a.labels == b.labels);

    s.seed = 43;
    const PointCloud c = generate(s);
    CHECK(a.data != c.data);
}

TEST_CASE("named instances generate with the advertised cluster counts") {
    for (const auto& [name, spec] : default_specs()) {
        DatasetSpec small = spec;
        small.n = 200;
        const PointCloud c = generate(small);
        REQUIRE(c.n == 200);
        REQUIRE(c.has_labels());
        const std::size_t k = small.k();
        if (name == "bottleneck" || name == "nonlinear_circles" ||
            name == "nadler_gaussians")
            CHECK(k == 3);
        else
            CHECK(k == 2);
        const auto counts = class_counts(c, k);
        for (std::size_t cls = 0; cls < k; ++cls) CHECK(counts[cls] > 0);
        CHECK(c.dim == 2);
    }
}

TEST_CASE("class proportions follow the weights") {
    DatasetSpec s;
    s.family = DatasetSpec::Family::bottleneck;
    s.n = 20000;
    s.seed = 7;
    s.weights = {0.5, 0.3, 0.2};
    const PointCloud c = generate(s);
    const auto counts = class_counts(c, 3);
    // 3-sigma band of the multinomial
    for (std::size_t cls = 0; cls < 3; ++cls) {
        const double p = s.weights[cls];
        const double mean = s.n * p;
        const double sd = std::sqrt(s.n * p * (1 - p));
        CHECK(std::abs(static_cast<double>(counts[cls]) - mean) <= 3.0 * sd);
    }
}

TEST_CASE("single-component mixture labels everything 1") {
    DatasetSpec s;
    s.family = DatasetSpec::Family::custom_mixture;
    s.n = 100;
    s.seed = 5;
    s.weights = {1.0};
    s.means = {Eigen::Vector2d(0.0, 0.0)};
    s.covs = {Eigen::Matrix2d::Identity()};
    const PointCloud c = generate(s);
    CHECK(s.k() == 1);
    for (int l : c.labels) CHECK(l == 1);
}

TEST_CASE("bottleneck blob tails are truncated") {
    DatasetSpec s;
    s.family = DatasetSpec::Family::bottleneck;
    s.n = 5000;
    s.seed = 3;
    const PointCloud c = generate(s);
    // no coordinate may exceed its blob center by more than trunc * std in
    // either axis; the coarse global check: the isolated third cluster keeps
    // a clear gap from the barbells, so the plane splits cleanly by label
    double max_y_12 = -1e300, min_y_3 = 1e300;
    for (std::size_t i = 0; i < c.n; ++i) {
        if (c.labels[i] == 3)
            min_y_3 = std::min(min_y_3, c.row(i)[1]);
        else
            max_y_12 = std::max(max_y_12, c.row(i)[1]);
    }
    CHECK(min_y_3 > max_y_12);  // truncation keeps the gap open
}

TEST_CASE("nonlinear circles have the annular geometry") {
    DatasetSpec s;
    s.family = DatasetSpec::Family::nonlinear_circles;
    s.n = 3000;
    s.seed = 9;
    const PointCloud c = generate(s);
    for (std::size_t i = 0; i < c.n; ++i) {
        const double r = std::hypot(c.row(i)[0], c.row(i)[1]);
        switch (c.labels[i]) {
            case 1:
                CHECK(r <= s.nc_disk_r + 1e-12);
                break;
            case 2:
                CHECK(std::abs(r - s.nc_radii[0]) <= s.nc_radial_std * 2.5 + 1e-9);
                break;
            case 3:
                CHECK(std::abs(r - s.nc_radii[1]) <= s.nc_radial_std * 2.5 + 1e-9);
                break;
            default:
                FAIL("unexpected label");
        }
    }
}

TEST_CASE("gaussian pair centers sit on the axes") {
    DatasetSpec s;
    s.family = DatasetSpec::Family::gaussian_pair;
    s.n = 20000;
    s.seed = 21;
    s.pair_scale = 2.0;
    const PointCloud c = generate(s);
    Eigen::Vector2d m1 = Eigen::Vector2d::Zero(), m2 = Eigen::Vector2d::Zero();
    std::size_t n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < c.n; ++i) {
        const Eigen::Vector2d x(c.row(i)[0], c.row(i)[1]);
        if (c.labels[i] == 1) {
            m1 += x;
            ++n1;
        } else {
            m2 += x;
            ++n2;
        }
    }
    m1 /= static_cast<double>(n1);
    m2 /= static_cast<double>(n2);
    // covariance I/10 at n ~ 1e4: means land within a few hundredths
    CHECK(m1(0) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(m1(1) == doctest::Approx(0.0).scale(1.0).epsilon(0.05));
    CHECK(m2(0) == doctest::Approx(0.0).scale(1.0).epsilon(0.05));
    CHECK(m2(1) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("invalid specs are rejected") {
    DatasetSpec s;
    s.family = DatasetSpec::Family::bottleneck;
    s.n = 2;  // fewer points than clusters
    CHECK_THROWS_AS(generate(s), InvalidParameterError);

    DatasetSpec w;
    w.family = DatasetSpec::Family::bottleneck;
    w.n = 100;
    w.weights = {0.5, 0.5};  // needs 3
    CHECK_THROWS_AS(generate(w), InvalidParameterError);

    DatasetSpec z;
    z.family = DatasetSpec::Family::custom_mixture;
    z.n = 50;
    z.weights = {0.5, 0.5};
    z.means = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
    z.covs = {Eigen::Matrix2d::Identity(), -Eigen::Matrix2d::Identity()};
    CHECK_THROWS_AS(generate(z), InvalidParameterError);
}
