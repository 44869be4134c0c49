#pragma once

#include "qmediate/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmediate {

struct Dataset {
    Matrix features; // samples x raw features
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<std::size_t> row_ids; // original CSV data-row numbers (0-based)

    std::size_t size() const { return labels.size(); }
};

struct LoadOptions {
    std::string label_column;
    bool binarize_median = false; // continuous target: value > median -> 1
    char delimiter = ',';
};

/// Parses a headered CSV into features + binary labels. Every non-label
/// column must be numeric; errors carry the offending row and column.
Dataset load_csv(const std::string& path, const LoadOptions& opts);

/// Zero-mean unit-variance transform with population (divide by n) SD,
/// fitted on the training split only. Constant columns are dropped with a
/// warning; an all-constant feature set is an error.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stddevs;
    std::vector<std::size_t> kept_columns;

    void fit(const Matrix& train);
    Matrix transform(const Matrix& x) const;
};

/// Projection onto the top-k eigenvectors of the training covariance
/// (population normalization). Rows of `components` are orthonormal; each
/// component's largest-absolute loading is made positive so projections are
/// reproducible.
struct PcaReducer {
    Matrix components; // k x features
    std::vector<double> component_variances;

    void fit(const Matrix& train, int k);
    Matrix transform(const Matrix& x) const;
};

struct PreprocessPipeline {
    Standardizer standardizer;
    PcaReducer pca;

    Matrix apply(const Matrix& x) const { return pca.transform(standardizer.transform(x)); }
};

struct StandardizeResult {
    Matrix train;
    Matrix test;
    Standardizer fitted;
};

StandardizeResult standardize(const Matrix& train, const Matrix& test);

struct PcaResult {
    Matrix train;
    Matrix test;
    PcaReducer fitted;
};

PcaResult pca_reduce(const Matrix& train, const Matrix& test, int k);

struct SplitResult {
    Dataset train;
    Dataset test;
};

struct IndexSplit {
    std::vector<std::size_t> rest; // e.g. training rows
    std::vector<std::size_t> held; // e.g. test rows
};

/// Stratified row split, both sides sorted. Per class floor(fraction * n_c)
/// held rows; remainder seats up to floor(fraction * n_total) go to classes
/// by descending size, ties to the smaller label. The caller supplies the
/// RNG so distinct consumers draw from their own streams.
IndexSplit stratified_index_split(const std::vector<int>& labels, double held_fraction,
                                  class Rng& rng);

/// Deterministic stratified split on the TestSplit stream of `seed`.
SplitResult stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed);

} // namespace qmediate
