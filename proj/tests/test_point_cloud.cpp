#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "lund/errors.hpp"
#include "lund/point_cloud.hpp"
#include "lund/rng.hpp"
#include "lund/simd.hpp"

using namespace lund;

namespace {

PointCloud unit_square() {
    PointCloud c;
    c.n = 4;
    c.dim = 2;
    c.data = {0, 0, 1, 0, 0, 1, 1, 1};
    return c;
}

struct TmpFile {
    std::string path;
    explicit TmpFile(const std::string& name) : path("/tmp/" + name) {}
    ~TmpFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("pairwise distances on the unit square") {
    const Eigen::MatrixXd d = pairwise_distances(unit_square());
    REQUIRE(d.rows() == 4);
    CHECK(d.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(d(0, 1) == doctest::Approx(1.0));
    CHECK(d(0, 2) == doctest::Approx(1.0));
    CHECK(d(0, 3) == doctest::Approx(std::sqrt(2.0)));
    CHECK(d(1, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairwise distances match a direct recompute on random data") {
    std::mt19937_64 g(11);
    PointCloud c;
    c.n = 37;
    c.dim = 5;
    c.data.resize(c.n * c.dim);
    for (auto& x : c.data) x = 4.0 * u01(g) - 2.0;
    const Eigen::MatrixXd d = pairwise_distances(c);
    for (std::size_t i = 0; i < c.n; ++i)
        for (std::size_t j = 0; j < c.n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < c.dim; ++k) {
                const double diff = c.row(i)[k] - c.row(j)[k];
                s += diff * diff;
            }
            CHECK(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                  doctest::Approx(std::sqrt(s)).epsilon(1e-12));
        }
}

TEST_CASE("single point cloud") {
    PointCloud c;
    c.n = 1;
    c.dim = 3;
    c.data = {1.0, 2.0, 3.0};
    const Eigen::MatrixXd d = pairwise_distances(c);
    REQUIRE(d.rows() == 1);
    CHECK(d(0, 0) == 0.0);
}

TEST_CASE("csv round trip preserves coordinates and labels") {
    TmpFile f("lund_pc_roundtrip.csv");
    std::mt19937_64 g(23);
    PointCloud c;
    c.n = 50;
    c.dim = 3;
    c.data.resize(c.n * c.dim);
    for (auto& x : c.data) x = 100.0 * (u01(g) - 0.5);
    c.labels.resize(c.n);
    for (std::size_t i = 0; i < c.n; ++i) c.labels[i] = 1 + static_cast<int>(i % 4);

    write_points_csv(c, f.path);
    const PointCloud r = read_points_csv(f.path);
    REQUIRE(r.n == c.n);
    REQUIRE(r.dim == c.dim);
    REQUIRE(r.has_labels());
    CHECK(r.labels == c.labels);
    for (std::size_t i = 0; i < c.n * c.dim; ++i) CHECK(r.data[i] == c.data[i]);
}

TEST_CASE("csv without header is all coordinates") {
    TmpFile f("lund_pc_noheader.csv");
    {
        std::ofstream out(f.path);
        out << "0.5,1.5\n-2.25,3\n";
    }
    const PointCloud r = read_points_csv(f.path);
    REQUIRE(r.n == 2);
    REQUIRE(r.dim == 2);
    CHECK_FALSE(r.has_labels());
    CHECK(r.row(0)[0] == 0.5);
    CHECK(r.row(1)[1] == 3.0);
}

TEST_CASE("unlabeled round trip stays unlabeled") {
    TmpFile f("lund_pc_nolabel.csv");
    PointCloud c;
    c.n = 3;
    c.dim = 2;
    c.data = {0, 0, 1, 1, 2, 2};
    write_points_csv(c, f.path);
    const PointCloud r = read_points_csv(f.path);
    CHECK_FALSE(r.has_labels());
    REQUIRE(r.n == 3);
    CHECK(r.row(2)[1] == 2.0);
}

TEST_CASE("missing file raises io error") {
    CHECK_THROWS_AS(read_points_csv("/tmp/lund_no_such_file_42.csv"), IoError);
}

TEST_CASE("ragged csv is rejected") {
    TmpFile f("lund_pc_ragged.csv");
    {
        std::ofstream out(f.path);
        out << "1,2\n3,4,5\n";
    }
    CHECK_THROWS_AS(read_points_csv(f.path), IoError);
}
