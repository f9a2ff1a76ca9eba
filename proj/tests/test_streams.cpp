#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "sduo/rng.hpp"
#include "sduo/streams.hpp"

using namespace sduo;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

} // namespace

TEST_SUITE_BEGIN("streams");

TEST_CASE("sea labels partition the input square into sum bands") {
    CHECK(sea_label(0.0, 0.0) == 1);
    CHECK(sea_label(1.0, 1.0) == 1);  // sum 2 < 3
    CHECK(sea_label(1.5, 1.6) == 2);  // sum crosses the first boundary
    CHECK(sea_label(15.0, 15.0) == 10);
    CHECK(sea_label(14.0, 13.5) == 10);

    auto rng = make_rng(51);
    std::uniform_real_distribution<double> u(0.0, 15.0);
    for (int i = 0; i < 2000; ++i) {
        const double x1 = u(rng), x2 = u(rng);
        const int label = sea_label(x1, x2);
        CHECK(label >= 1);
        CHECK(label <= 10);
        // inverse check: the sum lies inside the band of its label
        const double lo = 3.0 * (label - 1), hi = 3.0 * label;
        CHECK(x1 + x2 >= lo - 1e-12);
        if (label < 10)
            CHECK(x1 + x2 < hi + 1e-12);
    }
}

TEST_CASE("circles labels are concentric rings around the centre") {
    CHECK(circles_label(7.5, 7.5) == 1);
    CHECK(circles_label(0.0, 0.0) == 10); // corner, maximal distance
    CHECK(circles_label(15.0, 15.0) == 10);

    const double width = 7.5 * std::sqrt(2.0) / 10.0;
    CHECK(circles_label(7.5 + 0.99 * width, 7.5) == 1);
    CHECK(circles_label(7.5 + 1.01 * width, 7.5) == 2);

    auto rng = make_rng(52);
    std::uniform_real_distribution<double> u(0.0, 15.0);
    std::set<int> seen;
    for (int i = 0; i < 5000; ++i) {
        const int label = circles_label(u(rng), u(rng));
        CHECK(label >= 1);
        CHECK(label <= 10);
        seen.insert(label);
    }
    CHECK(seen.size() == 10);
}

TEST_CASE("drift applies a fixed label permutation, not new geometry") {
    CHECK(drift_permutation(1, 10) == 6);
    CHECK(drift_permutation(6, 10) == 1);
    CHECK(drift_permutation(10, 10) == 5);
    CHECK(drift_permutation(12, 12) == 6);
    // half shift is an involution for even K
    for (int c = 1; c <= 12; ++c)
        CHECK(drift_permutation(drift_permutation(c, 12), 12) == c);

    // same rng stream: identical x, permuted labels
    auto rng_a = make_rng(53), rng_b = make_rng(53);
    for (int i = 0; i < 500; ++i) {
        const LabelledExample e0 = gen_sea(0, rng_a);
        const LabelledExample e1 = gen_sea(1, rng_b);
        CHECK(e0.x == e1.x);
        CHECK(e1.label == drift_permutation(e0.label, 10));
    }
    auto rng_c = make_rng(54), rng_d = make_rng(54);
    for (int i = 0; i < 500; ++i) {
        const LabelledExample e0 = gen_circles(0, rng_c);
        const LabelledExample e1 = gen_circles(1, rng_d);
        CHECK(e0.x == e1.x);
        CHECK(e1.label == drift_permutation(e0.label, 10));
    }
}

TEST_CASE("feature marginal is unchanged across concepts") {
    // chi-square two-sample test over a 5x5 spatial grid, alpha = 0.01
    StreamSpec spec = make_variant_spec(SourceKind::sea, "abrupt");
    spec.seed = 55;
    spec.length = 16000;
    spec.drift_times = {8000};
    Stream stream(spec, 0);

    const int bins = 5;
    Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(bins, bins);
    Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(bins, bins);
    for (int t = 1; t <= 16000; ++t) {
        const LabelledExample e = stream.at(t);
        const int i = std::min(bins - 1, static_cast<int>(e.x(0) / 3.0));
        const int j = std::min(bins - 1, static_cast<int>(e.x(1) / 3.0));
        (t <= 8000 ? h0 : h1)(i, j) += 1.0;
    }
    double stat = 0.0;
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            const double pooled = (h0(i, j) + h1(i, j)) / 2.0;
            REQUIRE(pooled > 0.0);
            stat += (h0(i, j) - pooled) * (h0(i, j) - pooled) / pooled;
            stat += (h1(i, j) - pooled) * (h1(i, j) - pooled) / pooled;
        }
    CHECK(stat < 42.98); // chi-square 0.99 quantile, 24 dof
}

TEST_CASE("blob centres are far apart and generation concentrates on them") {
    const auto centers = blob_centers();
    REQUIRE(centers.size() == 12);
    double min_dist = 1e9;
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            min_dist = std::min(min_dist, (centers[i] - centers[j]).norm());
    CHECK(min_dist >= 4.0); // at least 4 sigma at the default sigma = 1

    auto rng = make_rng(56);
    for (int i = 0; i < 200; ++i) {
        const LabelledExample e = gen_blobs(0, 0.0, rng);
        CHECK(e.x ==
              centers[static_cast<std::size_t>(e.label - 1)]); // sigma 0
    }

    const int n = 10000;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i)
        sum += class_conditional_draw(SourceKind::blobs, 0, 7, 1.0, rng);
    const Eigen::Vector3d mean = sum / n;
    const double tol = 3.0 / std::sqrt(static_cast<double>(n));
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(mean(c) - centers[6](c)) < tol);
}

TEST_CASE("class-conditional draws land in the right region") {
    auto rng = make_rng(57);
    for (int cls = 1; cls <= 10; ++cls)
        for (int i = 0; i < 50; ++i) {
            const Eigen::VectorXd xs =
                class_conditional_draw(SourceKind::sea, 0, cls, 1.0, rng);
            CHECK(sea_label(xs(0), xs(1)) == cls);
            const Eigen::VectorXd xc =
                class_conditional_draw(SourceKind::circles, 0, cls, 1.0, rng);
            CHECK(circles_label(xc(0), xc(1)) == cls);
        }
    // concept 1: the drawn x carries the requested label after permutation
    for (int cls = 1; cls <= 10; ++cls) {
        const Eigen::VectorXd x =
            class_conditional_draw(SourceKind::sea, 1, cls, 1.0, rng);
        CHECK(drift_permutation(sea_label(x(0), x(1)), 10) == cls);
    }
}

TEST_CASE("concept schedule counts passed drift points") {
    StreamSpec abrupt = make_variant_spec(SourceKind::sea, "abrupt");
    CHECK(abrupt.drift_times == std::vector<int>{3000});
    CHECK(concept_at(abrupt, 1) == 0);
    CHECK(concept_at(abrupt, 2999) == 0);
    CHECK(concept_at(abrupt, 3000) == 1);
    CHECK(concept_at(abrupt, 17999) == 1);

    StreamSpec rec = make_variant_spec(SourceKind::sea, "recurrent");
    CHECK(rec.drift_times == std::vector<int>{3000, 6000, 9000, 12000});
    CHECK(concept_at(rec, 2999) == 0);
    CHECK(concept_at(rec, 3000) == 1);
    CHECK(concept_at(rec, 6500) == 0);
    CHECK(concept_at(rec, 9001) == 1);
    CHECK(concept_at(rec, 12000) == 0);

    StreamSpec original = make_variant_spec(SourceKind::sea, "original");
    CHECK(original.drift_times.empty());
    CHECK(concept_at(original, 17999) == 0);

    CHECK(make_variant_spec(SourceKind::sea, "imbalance").imbalance_ratio ==
          doctest::Approx(0.001));
    CHECK(make_variant_spec(SourceKind::sea, "abrupt_imbalance")
              .imbalance_ratio == doctest::Approx(0.01));
    CHECK_THROWS_AS(make_variant_spec(SourceKind::sea, "gradual"),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_variant_spec(SourceKind::file, "original"),
                    std::invalid_argument);
}

TEST_CASE("imbalance ratio shapes the class frequencies") {
    auto rng = make_rng(58);
    StreamSpec spec;
    spec.imbalance_ratio = 0.001;
    spec.majority_class = 1;

    // exact arithmetic: majority probability 1 - 9*0.001
    const int n = 200000;
    std::map<int, int> counts;
    for (int i = 0; i < n; ++i)
        counts[apply_imbalance(spec, 10, rng)]++;
    CHECK(std::abs(counts[1] / static_cast<double>(n) - 0.991) < 0.005);
    for (int c = 2; c <= 10; ++c) {
        const double freq = counts[c] / static_cast<double>(n);
        CHECK(freq > 0.0008 * 0.5);
        CHECK(freq < 0.001 * 2.0);
    }

    StreamSpec uniform;
    std::map<int, int> ucounts;
    for (int i = 0; i < 50000; ++i)
        ucounts[apply_imbalance(uniform, 10, rng)]++;
    for (int c = 1; c <= 10; ++c)
        CHECK(std::abs(ucounts[c] / 50000.0 - 0.1) < 0.1 * 0.2);

    StreamSpec bad;
    bad.imbalance_ratio = 0.2; // 9 minorities at 0.2 overflow probability 1
    CHECK_THROWS_AS(apply_imbalance(bad, 10, rng), std::invalid_argument);
}

TEST_CASE("streams are reproducible and reach every class") {
    StreamSpec spec = make_variant_spec(SourceKind::circles, "original");
    spec.seed = 59;
    spec.length = 400;
    Stream a(spec, 10), b(spec, 10);
    std::set<int> labels;
    for (int t = 1; t <= 400; ++t) {
        const LabelledExample ea = a.at(t), eb = b.at(t);
        CHECK(ea.x == eb.x);
        CHECK(ea.label == eb.label);
        labels.insert(ea.label);
    }
    CHECK(labels.size() == 10);

    // warm-up set: seed_per_class per class, undrifted concept, reproducible
    REQUIRE(a.seed_data().size() == 100);
    std::map<int, int> per_class;
    for (std::size_t i = 0; i < a.seed_data().size(); ++i) {
        const auto& e = a.seed_data()[i];
        per_class[e.label]++;
        CHECK(circles_label(e.x(0), e.x(1)) == e.label);
        CHECK(e.x == b.seed_data()[i].x);
    }
    for (int c = 1; c <= 10; ++c)
        CHECK(per_class[c] == 10);
}

TEST_CASE("delimited files load with ordered rows and dense labels") {
    const auto path = write_temp("sduo_small.csv",
                                 "1.5,2.5,3\n"
                                 "0.25,-1,7\n"
                                 "4,4,3\n");
    const LoadedData d = load_delimited(path, false);
    CHECK(d.dim == 2);
    CHECK(d.num_classes == 2); // labels {3,7} remap to {1,2}
    REQUIRE(d.examples.size() == 3);
    CHECK(d.examples[0].x(0) == 1.5);
    CHECK(d.examples[0].label == 1);
    CHECK(d.examples[1].label == 2);
    CHECK(d.examples[2].label == 1);

    const auto with_header = write_temp("sduo_header.csv",
                                        "f1,f2,label\n"
                                        "1,2,1\n"
                                        "3,4,2\n");
    CHECK(load_delimited(with_header, false).examples.size() == 2); // auto skip
    CHECK(load_delimited(with_header, true).examples.size() == 2);

    const auto ragged = write_temp("sduo_ragged.csv", "1,2,1\n1,2\n");
    CHECK_THROWS_WITH_AS(load_delimited(ragged, false),
                         doctest::Contains("line 2"), std::runtime_error);

    const auto garbled = write_temp("sduo_bad.csv", "1,2,1\n1,zeta,2\n");
    CHECK_THROWS_WITH_AS(load_delimited(garbled, false),
                         doctest::Contains("line 2"), std::runtime_error);

    const auto fractional = write_temp("sduo_fraclbl.csv", "1,2,1.5\n");
    CHECK_THROWS_AS(load_delimited(fractional, false), std::runtime_error);

    CHECK_THROWS_AS(load_delimited("/definitely/not/here.csv", false),
                    std::runtime_error);
}

TEST_CASE("a realistic file round-trips through the stream carve-out") {
    // 1400 rows, 10 features, 4 classes in repeating order
    std::string body;
    int rows_per_class[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 1400; ++i) {
        for (int f = 0; f < 10; ++f)
            body += std::to_string(0.01 * (i + f)) + ",";
        const int cls = i % 4 + 1;
        rows_per_class[cls]++;
        body += std::to_string(cls * 10) + "\n"; // sparse original labels
    }
    const auto path = write_temp("sduo_keys.csv", body);
    const LoadedData d = load_delimited(path, false);
    CHECK(d.dim == 10);
    CHECK(d.num_classes == 4);
    CHECK(d.examples.size() == 1400);

    StreamSpec spec;
    spec.source = SourceKind::file;
    spec.path = path;
    Stream s(spec, 10);
    CHECK(s.num_classes() == 4);
    CHECK(s.dim() == 10);
    CHECK(s.seed_data().size() == 40);
    CHECK(s.length() == 1360); // carved rows leave the stream
    // earliest rows per class are carved: first 40 rows in file order
    for (int i = 0; i < 40; ++i)
        CHECK(s.seed_data()[static_cast<std::size_t>(i)].x(0) ==
              doctest::Approx(0.01 * i));
    CHECK(s.at(1).x(0) == doctest::Approx(0.01 * 40));

    // file streams take no synthetic knobs
    StreamSpec bad = spec;
    bad.drift_times = {100};
    CHECK_THROWS_AS(Stream(bad, 10), std::invalid_argument);
    StreamSpec bad2 = spec;
    bad2.imbalance_ratio = 0.1;
    CHECK_THROWS_AS(Stream(bad2, 10), std::invalid_argument);
}

TEST_CASE("imbalanced streams starve the minority classes") {
    StreamSpec spec = make_variant_spec(SourceKind::sea, "imbalance");
    spec.seed = 60;
    spec.length = 30000;
    Stream s(spec, 0);
    std::map<int, int> counts;
    for (int t = 1; t <= spec.length; ++t)
        counts[s.at(t).label]++;
    CHECK(counts[1] > 0.98 * spec.length);
    int minority_total = 0;
    for (int c = 2; c <= 10; ++c)
        minority_total += counts[c];
    CHECK(minority_total > 0);
    CHECK(minority_total < 0.02 * spec.length);
}

TEST_SUITE_END();
