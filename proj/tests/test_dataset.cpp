#include "qmediate/dataset.hpp"
#include "qmediate/errors.hpp"
#include "qmediate/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace qmediate;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("load_csv parses a toy table") {
    TempFile file("qmediate_toy.csv", "age,bp,label\n1,2,0\n3,4,1\n5,6,0\n");
    LoadOptions opts;
    opts.label_column = "label";
    const Dataset data = load_csv(file.path, opts);
    CHECK(data.size() == 3);
    CHECK(data.features.cols() == 2);
    CHECK(data.features.at(1, 0) == doctest::Approx(3.0));
    CHECK(data.labels == std::vector<int>{0, 1, 0});
    CHECK(data.feature_names == std::vector<std::string>{"age", "bp"});
}

TEST_CASE("load_csv errors carry the row and column") {
    TempFile file("qmediate_bad.csv", "age,bp,label\n1,2,0\n3,oops,1\n");
    LoadOptions opts;
    opts.label_column = "label";
    try {
        load_csv(file.path, opts);
        FAIL("expected IngestError");
    } catch (const IngestError& err) {
        const std::string what = err.what();
        CHECK(what.find("row 2") != std::string::npos);
        CHECK(what.find("bp") != std::string::npos);
    }

    TempFile empty("qmediate_empty.csv", "");
    CHECK_THROWS_AS(load_csv(empty.path, opts), IngestError);

    TempFile nolabel("qmediate_nolabel.csv", "a,b\n1,2\n");
    CHECK_THROWS_AS(load_csv(nolabel.path, opts), IngestError);
}

TEST_CASE("median binarization maps values above the median to 1") {
    TempFile file("qmediate_median.csv", "x,target\n10,1\n11,2\n12,3\n13,4\n");
    LoadOptions opts;
    opts.label_column = "target";
    opts.binarize_median = true;
    const Dataset data = load_csv(file.path, opts);
    // median 2.5; ties would fall to class 0
    CHECK(data.labels == std::vector<int>{0, 0, 1, 1});

    LoadOptions strict;
    strict.label_column = "target";
    CHECK_THROWS_AS(load_csv(file.path, strict), IngestError);
}

TEST_CASE("standardizer uses population SD fitted on train only") {
    Matrix train(3, 1);
    train.at(0, 0) = 1;
    train.at(1, 0) = 2;
    train.at(2, 0) = 3;
    Matrix test(1, 1);
    test.at(0, 0) = 2.5;

    const StandardizeResult result = standardize(train, test);
    // sigma = sqrt(2/3) = 0.8165
    CHECK(result.train.at(0, 0) == doctest::Approx(-1.2247448714).epsilon(1e-9));
    CHECK(result.train.at(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(result.train.at(2, 0) == doctest::Approx(1.2247448714).epsilon(1e-9));
    CHECK(result.test.at(0, 0) == doctest::Approx(0.5 / std::sqrt(2.0 / 3.0)).epsilon(1e-9));

    // Transforming an already-standardized column with its own fitted stats
    // is a no-op.
    Standardizer fitted;
    fitted.fit(result.train);
    const Matrix twice = fitted.transform(result.train);
    CHECK(twice.at(0, 0) == doctest::Approx(result.train.at(0, 0)).epsilon(1e-10));
}

TEST_CASE("constant feature columns are dropped; all-constant is an error") {
    Matrix train(3, 2);
    for (int r = 0; r < 3; ++r) {
        train.at(static_cast<std::size_t>(r), 0) = 7.0;
        train.at(static_cast<std::size_t>(r), 1) = r;
    }
    Standardizer s;
    s.fit(train);
    CHECK(s.kept_columns == std::vector<std::size_t>{1});
    CHECK(s.transform(train).cols() == 1);

    Matrix constant(3, 1, 5.0);
    Standardizer bad;
    CHECK_THROWS_AS(bad.fit(constant), PreprocessError);
}

TEST_CASE("PCA on rank-1 data keeps the diagonal direction") {
    Matrix train(6, 2);
    for (int r = 0; r < 6; ++r) {
        train.at(static_cast<std::size_t>(r), 0) = r - 2.5;
        train.at(static_cast<std::size_t>(r), 1) = r - 2.5; // y = x exactly
    }
    const PcaResult result = pca_reduce(train, train, 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(result.fitted.components.at(0, 0) - inv_sqrt2) < 1e-9);
    CHECK(std::abs(result.fitted.components.at(0, 1) - inv_sqrt2) < 1e-9);
    for (int r = 0; r < 6; ++r) {
        const double expected = (train.at(static_cast<std::size_t>(r), 0) +
                                 train.at(static_cast<std::size_t>(r), 1)) *
                                inv_sqrt2;
        CHECK(result.train.at(static_cast<std::size_t>(r), 0) ==
              doctest::Approx(expected).epsilon(1e-9));
    }
    // The orthogonal direction carries no variance.
    PcaReducer full;
    full.fit(train, 2);
    CHECK(full.component_variances[1] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("PCA with k = raw dimension reconstructs the input") {
    Rng rng(3);
    Matrix train(20, 3);
    for (std::size_t r = 0; r < 20; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            train.at(r, c) = rng.normal();
        }
    }
    PcaReducer pca;
    pca.fit(train, 3);
    const Matrix projected = pca.transform(train);

    // Rows are orthonormal.
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double dot = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                dot += pca.components.at(i, c) * pca.components.at(j, c);
            }
            CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
        }
    }

    // With a complete orthonormal basis, proj * V recovers the input.
    for (std::size_t r = 0; r < 20; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            double back = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                back += projected.at(r, k) * pca.components.at(k, c);
            }
            CHECK(back == doctest::Approx(train.at(r, c)).epsilon(1e-8));
        }
    }

    CHECK_THROWS_AS(pca.fit(train, 4), PreprocessError);
}

TEST_CASE("PCA retained variance on isotropic data") {
    Rng rng(17);
    Matrix train(400, 4);
    for (std::size_t r = 0; r < 400; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            train.at(r, c) = rng.normal();
        }
    }
    PcaReducer pca;
    pca.fit(train, 2);
    // Oracle: total variance is the covariance trace; with identity
    // covariance each of the 4 directions carries about a quarter.
    double total = 0.0;
    std::vector<double> mean(4, 0.0);
    for (std::size_t r = 0; r < 400; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            mean[c] += train.at(r, c);
        }
    }
    for (double& m : mean) {
        m /= 400.0;
    }
    for (std::size_t r = 0; r < 400; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const double d = train.at(r, c) - mean[c];
            total += d * d / 400.0;
        }
    }
    const double retained = pca.component_variances[0] + pca.component_variances[1];
    CHECK(retained / total > 0.4);
    CHECK(retained / total < 0.75);
}

TEST_CASE("stratified split honors proportions and determinism") {
    Dataset data;
    data.features = Matrix(10, 1);
    for (std::size_t r = 0; r < 10; ++r) {
        data.features.at(r, 0) = static_cast<double>(r);
        data.labels.push_back(r < 5 ? 0 : 1);
        data.row_ids.push_back(r);
    }
    data.feature_names = {"x"};

    const SplitResult split = stratified_split(data, 0.3, 42);
    CHECK(split.test.size() == 3);
    CHECK(split.train.size() == 7);
    int test_class0 = 0;
    for (const int y : split.test.labels) {
        test_class0 += y == 0 ? 1 : 0;
    }
    CHECK(test_class0 >= 1);
    CHECK(test_class0 <= 2);

    const SplitResult again = stratified_split(data, 0.3, 42);
    CHECK(again.test.row_ids == split.test.row_ids);
    CHECK(again.train.row_ids == split.train.row_ids);

    // Larger pool so distinct seeds almost surely pick different rows.
    Dataset big;
    big.features = Matrix(40, 1);
    for (std::size_t r = 0; r < 40; ++r) {
        big.features.at(r, 0) = static_cast<double>(r);
        big.labels.push_back(r < 20 ? 0 : 1);
        big.row_ids.push_back(r);
    }
    big.feature_names = {"x"};
    const SplitResult seed42 = stratified_split(big, 0.3, 42);
    const SplitResult seed142 = stratified_split(big, 0.3, 142);
    CHECK(seed42.test.size() == seed142.test.size());
    CHECK(seed42.test.row_ids != seed142.test.row_ids);

    Dataset tiny;
    tiny.features = Matrix(3, 1);
    tiny.labels = {0, 0, 1};
    tiny.row_ids = {0, 1, 2};
    tiny.feature_names = {"x"};
    CHECK_THROWS_AS(stratified_split(tiny, 0.3, 1), SplitError);
}
