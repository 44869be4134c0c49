#include "qmediate/dataset.hpp"

#include "qmediate/csv.hpp"
#include "qmediate/errors.hpp"
#include "qmediate/rng.hpp"
#include "qmediate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>

namespace qmediate {

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

Dataset load_csv(const std::string& path, const LoadOptions& opts) {
    const CsvTable table = read_csv(path, opts.delimiter);
    if (table.rows.empty()) {
        throw IngestError("CSV file '" + path + "' has no data rows");
    }
    const std::size_t label_col = table.column(opts.label_column);

    Dataset data;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c != label_col) {
            data.feature_names.push_back(table.header[c]);
        }
    }
    const std::size_t n_features = data.feature_names.size();
    if (n_features == 0) {
        throw IngestError("CSV file '" + path + "' has no feature columns");
    }

    data.features = Matrix(table.rows.size(), n_features);
    std::vector<double> raw_labels(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::size_t f = 0;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const double value = parse_double_cell(table.rows[r][c], r + 1, table.header[c]);
            if (c == label_col) {
                raw_labels[r] = value;
            } else {
                data.features.at(r, f++) = value;
            }
        }
        data.row_ids.push_back(r);
    }

    data.labels.resize(raw_labels.size());
    if (opts.binarize_median) {
        // Continuous target: strictly above the median maps to class 1,
        // ties at the median go to class 0.
        const double median = median_of(raw_labels);
        for (std::size_t r = 0; r < raw_labels.size(); ++r) {
            data.labels[r] = raw_labels[r] > median ? 1 : 0;
        }
    } else {
        for (std::size_t r = 0; r < raw_labels.size(); ++r) {
            if (raw_labels[r] == 0.0) {
                data.labels[r] = 0;
            } else if (raw_labels[r] == 1.0) {
                data.labels[r] = 1;
            } else {
                throw IngestError("row " + std::to_string(r + 1) + ", column '" +
                                  opts.label_column + "': label " + format_double(raw_labels[r]) +
                                  " is not in {0,1}; use binarize_median for continuous targets");
            }
        }
    }
    return data;
}

void Standardizer::fit(const Matrix& train) {
    means.clear();
    stddevs.clear();
    kept_columns.clear();
    const std::size_t n = train.rows();
    if (n == 0) {
        throw PreprocessError("standardize: empty training split");
    }
    for (std::size_t c = 0; c < train.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            sum += train.at(r, c);
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = train.at(r, c) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n)); // population SD
        if (sd <= 0.0) {
            std::cerr << "warning: dropping constant feature column " << c << "\n";
            continue;
        }
        means.push_back(mean);
        stddevs.push_back(sd);
        kept_columns.push_back(c);
    }
    if (kept_columns.empty()) {
        throw PreprocessError("standardize: every feature column is constant");
    }
}

Matrix Standardizer::transform(const Matrix& x) const {
    Matrix out(x.rows(), kept_columns.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t j = 0; j < kept_columns.size(); ++j) {
            out.at(r, j) = (x.at(r, kept_columns[j]) - means[j]) / stddevs[j];
        }
    }
    return out;
}

StandardizeResult standardize(const Matrix& train, const Matrix& test) {
    StandardizeResult result;
    result.fitted.fit(train);
    result.train = result.fitted.transform(train);
    result.test = result.fitted.transform(test);
    return result;
}

void PcaReducer::fit(const Matrix& train, int k) {
    const std::size_t n = train.rows();
    const std::size_t d = train.cols();
    if (k < 1 || static_cast<std::size_t>(k) > std::min(n, d)) {
        throw PreprocessError("pca: k = " + std::to_string(k) +
                              " exceeds min(features, training samples)");
    }
    // Population covariance of the training block.
    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            mean[c] += train.at(r, c);
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(n);
    }
    Matrix cov(d, d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            const double di = train.at(r, i) - mean[i];
            for (std::size_t j = i; j < d; ++j) {
                cov.at(i, j) += di * (train.at(r, j) - mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov.at(i, j) /= static_cast<double>(n);
            cov.at(j, i) = cov.at(i, j);
        }
    }

    const SymmetricEigen eig = symmetric_eigen(cov);
    components = Matrix(static_cast<std::size_t>(k), d);
    component_variances.assign(static_cast<std::size_t>(k), 0.0);
    for (int comp = 0; comp < k; ++comp) {
        component_variances[static_cast<std::size_t>(comp)] =
            eig.values[static_cast<std::size_t>(comp)];
        // Deterministic sign: the largest-absolute loading is positive.
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            const double v = std::abs(eig.vectors.at(r, static_cast<std::size_t>(comp)));
            if (v > best) {
                best = v;
                arg = r;
            }
        }
        const double sign = eig.vectors.at(arg, static_cast<std::size_t>(comp)) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < d; ++r) {
            components.at(static_cast<std::size_t>(comp), r) =
                sign * eig.vectors.at(r, static_cast<std::size_t>(comp));
        }
    }
}

Matrix PcaReducer::transform(const Matrix& x) const {
    if (x.cols() != components.cols()) {
        throw PreprocessError("pca: input has " + std::to_string(x.cols()) +
                              " features, expected " + std::to_string(components.cols()));
    }
    Matrix out(x.rows(), components.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t comp = 0; comp < components.rows(); ++comp) {
            double sum = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                sum += x.at(r, c) * components.at(comp, c);
            }
            out.at(r, comp) = sum;
        }
    }
    return out;
}

PcaResult pca_reduce(const Matrix& train, const Matrix& test, int k) {
    PcaResult result;
    result.fitted.fit(train, k);
    result.train = result.fitted.transform(train);
    result.test = result.fitted.transform(test);
    return result;
}

IndexSplit stratified_index_split(const std::vector<int>& labels, double held_fraction,
                                  Rng& rng) {
    if (held_fraction <= 0.0 || held_fraction >= 1.0) {
        throw SplitError("stratified split: fraction must be in (0, 1)");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        by_class[labels[r]].push_back(r);
    }
    if (by_class.size() < 2) {
        throw SplitError("stratified split: both classes must be present");
    }
    for (const auto& [label, rows] : by_class) {
        if (rows.size() < 2) {
            throw SplitError("stratified split: class " + std::to_string(label) +
                             " has fewer than 2 samples");
        }
    }

    const std::size_t total_held =
        static_cast<std::size_t>(held_fraction * static_cast<double>(labels.size()));
    std::map<int, std::size_t> held_count;
    std::size_t assigned = 0;
    for (const auto& [label, rows] : by_class) {
        held_count[label] =
            static_cast<std::size_t>(held_fraction * static_cast<double>(rows.size()));
        assigned += held_count[label];
    }
    std::vector<int> labels_by_size;
    for (const auto& [label, rows] : by_class) {
        labels_by_size.push_back(label);
    }
    std::sort(labels_by_size.begin(), labels_by_size.end(), [&](int lhs, int rhs) {
        if (by_class[lhs].size() != by_class[rhs].size()) {
            return by_class[lhs].size() > by_class[rhs].size();
        }
        return lhs < rhs;
    });
    for (std::size_t i = 0; assigned < total_held; ++i) {
        const int label = labels_by_size[i % labels_by_size.size()];
        if (held_count[label] < by_class[label].size() - 1) {
            ++held_count[label];
            ++assigned;
        }
        if (i > 4 * labels_by_size.size()) {
            break; // every class saturated
        }
    }

    IndexSplit split;
    for (auto& [label, rows] : by_class) {
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i < held_count[label]) {
                split.held.push_back(rows[i]);
            } else {
                split.rest.push_back(rows[i]);
            }
        }
    }
    std::sort(split.held.begin(), split.held.end());
    std::sort(split.rest.begin(), split.rest.end());
    return split;
}

SplitResult stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    Rng rng = make_stream(seed, RngStream::TestSplit);
    const IndexSplit split = stratified_index_split(data.labels, test_fraction, rng);
    const std::vector<std::size_t>& test_rows = split.held;
    const std::vector<std::size_t>& train_rows = split.rest;

    auto subset = [&](const std::vector<std::size_t>& rows) {
        Dataset out;
        out.feature_names = data.feature_names;
        out.features = Matrix(rows.size(), data.features.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t c = 0; c < data.features.cols(); ++c) {
                out.features.at(i, c) = data.features.at(rows[i], c);
            }
            out.labels.push_back(data.labels[rows[i]]);
            out.row_ids.push_back(data.row_ids[rows[i]]);
        }
        return out;
    };

    return SplitResult{subset(train_rows), subset(test_rows)};
}

} // namespace qmediate
