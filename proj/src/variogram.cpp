#include "graphvario/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "graphvario/rng.hpp"

namespace graphvario {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
    std::optional<double> mean;
    std::optional<double> stddev;
};

// Shifted two-pass moments; identical inputs give exactly (v, 0).
Moments moments(const std::vector<double>& v) {
    if (v.empty()) return {};
    const double shift = v.front();
    double acc = 0.0;
    for (double x : v) acc += x - shift;
    const double mean = shift + acc / static_cast<double>(v.size());
    if (v.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

void require_length(Eigen::Index got, std::size_t expected, const char* where) {
    if (static_cast<std::size_t>(got) != expected)
        throw std::invalid_argument(std::string(where) + ": signal length " + std::to_string(got) +
                                    " does not match graph size " + std::to_string(expected));
}

}  // namespace

// ---- BinPartition ---------------------------------------------------------

BinPartition::BinPartition(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2) throw std::invalid_argument("BinPartition: need at least one bin");
    if (edges_.front() != 0.0) throw std::invalid_argument("BinPartition: first edge must be 0");
    for (std::size_t j = 1; j < edges_.size(); ++j) {
        if (!(edges_[j] > edges_[j - 1]) || !std::isfinite(edges_[j]))
            throw std::invalid_argument("BinPartition: edges must be finite and strictly increasing");
    }
}

BinPartition BinPartition::equal_width(double d_max, std::size_t count) {
    if (count < 1) throw std::invalid_argument("make_bins: bin count must be >= 1");
    if (!(d_max > 0.0) || !std::isfinite(d_max)) throw std::invalid_argument("make_bins: d_max must be > 0");
    std::vector<double> edges(count + 1);
    for (std::size_t j = 0; j < count; ++j)
        edges[j] = d_max * (static_cast<double>(j) / static_cast<double>(count));
    edges[count] = d_max;
    return BinPartition(std::move(edges));
}

std::vector<double> BinPartition::centers() const {
    std::vector<double> c(size());
    for (std::size_t j = 0; j < size(); ++j) c[j] = center(j);
    return c;
}

std::optional<std::size_t> BinPartition::locate(double d) const noexcept {
    if (!(d > 0.0) || d > edges_.back()) return std::nullopt;
    const auto it = std::lower_bound(edges_.begin() + 1, edges_.end(), d);
    return static_cast<std::size_t>(it - (edges_.begin() + 1));
}

BinPartition make_bins(const SensorGraph& graph, std::size_t count) {
    if (count < 1) throw std::invalid_argument("make_bins: bin count must be >= 1");
    if (!(graph.max_distance() > 0.0)) throw std::invalid_argument("make_bins: graph has no pair with d > 0");
    return BinPartition::equal_width(graph.max_distance(), count);
}

// ---- Windows --------------------------------------------------------------

VertexWindow VertexWindow::ball(double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball window: radius must be >= 0");
    return {WindowKind::ball, radius};
}

VertexWindow VertexWindow::gaussian(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("gaussian window: rho must be > 0");
    return {WindowKind::gaussian, rho};
}

Eigen::VectorXd VertexWindow::values(const SpatialSample& sample, std::size_t center) const {
    const auto n = static_cast<Eigen::Index>(sample.size());
    if (kind == WindowKind::ones) return Eigen::VectorXd::Ones(n);
    if (center >= sample.size()) throw std::out_of_range("window centre out of range");
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = sample.distance(static_cast<std::size_t>(i), center);
        g(i) = kind == WindowKind::ball ? (d <= scale ? 1.0 : 0.0) : std::exp(-(d * d) / (2.0 * scale * scale));
    }
    return g;
}

// ---- Binned support and families -------------------------------------------

SparseMatrix BinnedSupport::mask(std::size_t bin) const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * pairs.at(bin).size());
    for (const auto& [i, j] : pairs[bin]) {
        triplets.emplace_back(i, j, 1.0);
        triplets.emplace_back(j, i, 1.0);
    }
    SparseMatrix m(static_cast<Eigen::Index>(vertices), static_cast<Eigen::Index>(vertices));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

std::shared_ptr<const BinnedSupport> bin_support(const SensorGraph& graph, const BinPartition& bins) {
    auto support = std::make_shared<BinnedSupport>(BinnedSupport{bins, graph.size(), {}});
    support->pairs.resize(bins.size());
    for (const auto& e : graph.edges()) {
        if (const auto bin = bins.locate(e.distance)) support->pairs[*bin].emplace_back(e.i, e.j);
    }
    return support;
}

BinnedGraphFamily::BinnedGraphFamily(std::shared_ptr<const BinnedSupport> support, const Eigen::VectorXd& g,
                                     std::optional<std::size_t> center)
    : support_(std::move(support)), center_(center) {
    if (!support_) throw std::invalid_argument("BinnedGraphFamily: null support");
    const std::size_t n = support_->vertices;
    if (static_cast<std::size_t>(g.size()) != n) throw std::invalid_argument("BinnedGraphFamily: window length mismatch");
    if (center_ && *center_ >= n) throw std::out_of_range("BinnedGraphFamily: centre out of range");
    if ((g.array() < 0.0).any()) throw std::invalid_argument("BinnedGraphFamily: window values must be nonnegative");

    const std::size_t h = support_->size();
    adjacency_.reserve(h);
    laplacians_.reserve(h);
    normalization_.reserve(h);
    pair_counts_.reserve(h);
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t bin = 0; bin < h; ++bin) {
        triplets.clear();
        std::size_t count = 0;
        for (const auto& [i, j] : support_->pairs[bin]) {
            const double w = g(i) * g(j);
            if (w == 0.0) continue;
            triplets.emplace_back(i, j, w);
            triplets.emplace_back(j, i, w);
            ++count;
        }
        SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        a.setFromTriplets(triplets.begin(), triplets.end());
        LaplacianView view = laplacian_from_adjacency(a);
        normalization_.push_back(view.degree.sum());
        pair_counts_.push_back(count);
        adjacency_.push_back(std::move(a));
        laplacians_.push_back(std::move(view));
    }
}

BinnedGraphFamily binned_family(const SensorGraph& graph, const BinPartition& bins, const VertexWindow& window,
                                std::optional<std::size_t> center) {
    if (!window.is_ones() && !center) throw std::invalid_argument("binned_family: window requires a centre vertex");
    if (center && *center >= graph.size()) throw std::out_of_range("binned_family: centre out of range");
    return BinnedGraphFamily(bin_support(graph, bins), window.values(graph.sample(), center.value_or(0)), center);
}

// ---- Estimators -------------------------------------------------------------

std::optional<double> VariogramEstimate::semivariogram(std::size_t bin) const {
    const auto& v = values.at(bin);
    if (!v) return std::nullopt;
    return *v / 2.0;
}

VariogramEstimate local_graph_variogram(const Eigen::Ref<const Eigen::VectorXd>& x, const BinnedGraphFamily& family) {
    require_length(x.size(), family.vertices(), "local_graph_variogram");
    VariogramEstimate est{family.bins(), {}, {}, Scope::local, family.center()};
    est.values.resize(family.size());
    est.pair_counts.resize(family.size());
    for (std::size_t bin = 0; bin < family.size(); ++bin) {
        est.pair_counts[bin] = family.pair_count(bin);
        const double norm = family.normalization(bin);
        if (norm == 0.0) continue;
        est.values[bin] = 2.0 * laplacian_quadratic_form(family.laplacian(bin).laplacian, x) / norm;
    }
    return est;
}

namespace {

std::vector<std::size_t> unwindowed_pair_counts(const BinnedSupport& support) {
    std::vector<std::size_t> counts(support.size());
    for (std::size_t bin = 0; bin < support.size(); ++bin) counts[bin] = support.pairs[bin].size();
    return counts;
}

// Accumulates local values over centres, in centre order, for every column.
std::vector<VariogramEstimate> windowed_global(const Eigen::MatrixXd& signals, const SensorGraph& graph,
                                               const BinPartition& bins, const VertexWindow& window,
                                               unsigned threads) {
    const auto support = bin_support(graph, bins);
    const std::size_t h = bins.size();
    const std::size_t r = static_cast<std::size_t>(signals.cols());
    std::vector<std::vector<double>> sums(r, std::vector<double>(h, 0.0));
    std::vector<std::size_t> defined(h, 0);
    for (std::size_t k = 0; k < graph.size(); ++k) {
        const BinnedGraphFamily family(support, window.values(graph.sample(), k), k);
        for (std::size_t bin = 0; bin < h; ++bin)
            if (family.normalization(bin) != 0.0) ++defined[bin];
        parallel_for(r, threads, [&](std::size_t col) {
            const auto local = local_graph_variogram(signals.col(static_cast<Eigen::Index>(col)), family);
            for (std::size_t bin = 0; bin < h; ++bin)
                if (local.values[bin]) sums[col][bin] += *local.values[bin];
        });
    }
    const auto counts = unwindowed_pair_counts(*support);
    std::vector<VariogramEstimate> out;
    out.reserve(r);
    for (std::size_t col = 0; col < r; ++col) {
        VariogramEstimate est{bins, std::vector<std::optional<double>>(h), counts, Scope::global, std::nullopt};
        for (std::size_t bin = 0; bin < h; ++bin)
            if (defined[bin] > 0) est.values[bin] = sums[col][bin] / static_cast<double>(defined[bin]);
        out.push_back(std::move(est));
    }
    return out;
}

}  // namespace

std::vector<VariogramEstimate> global_graph_variograms(const Eigen::MatrixXd& signals, const SensorGraph& graph,
                                                       const BinPartition& bins, const VertexWindow& window,
                                                       unsigned threads) {
    require_length(signals.rows(), graph.size(), "global_graph_variogram");
    if (!window.is_ones()) return windowed_global(signals, graph, bins, window, threads);

    const BinnedGraphFamily family(bin_support(graph, bins), Eigen::VectorXd::Ones(signals.rows()), std::nullopt);
    std::vector<VariogramEstimate> out(static_cast<std::size_t>(signals.cols()));
    parallel_for(out.size(), threads, [&](std::size_t col) {
        out[col] = local_graph_variogram(signals.col(static_cast<Eigen::Index>(col)), family);
        out[col].scope = Scope::global;
    });
    return out;
}

VariogramEstimate global_graph_variogram(const Eigen::Ref<const Eigen::VectorXd>& x, const SensorGraph& graph,
                                         const BinPartition& bins, const VertexWindow& window) {
    const Eigen::MatrixXd one = x;
    return std::move(global_graph_variograms(one, graph, bins, window, 1).front());
}

VariogramEstimate classical_empirical_variogram(const Eigen::Ref<const Eigen::VectorXd>& x,
                                                const SpatialSample& sample, const BinPartition& bins) {
    require_length(x.size(), sample.size(), "classical_empirical_variogram");
    const std::size_t h = bins.size();
    std::vector<double> sums(h, 0.0);
    std::vector<std::size_t> counts(h, 0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = i + 1; j < sample.size(); ++j) {
            const auto bin = bins.locate(sample.distance(i, j));
            if (!bin) continue;
            const double diff = x(static_cast<Eigen::Index>(i)) - x(static_cast<Eigen::Index>(j));
            sums[*bin] += diff * diff;
            ++counts[*bin];
        }
    }
    VariogramEstimate est{bins, std::vector<std::optional<double>>(h), counts, Scope::global, std::nullopt};
    for (std::size_t bin = 0; bin < h; ++bin)
        if (counts[bin] > 0) est.values[bin] = sums[bin] / static_cast<double>(counts[bin]);
    return est;
}

// ---- Statistics -----------------------------------------------------------

EnsembleStatistics ensemble_statistics(std::span<const VariogramEstimate> estimates) {
    if (estimates.empty()) throw std::invalid_argument("ensemble_statistics: no estimates");
    const BinPartition& bins = estimates.front().bins;
    const std::size_t h = bins.size();
    for (const auto& e : estimates)
        if (!(e.bins == bins)) throw std::invalid_argument("ensemble_statistics: estimates use different bin partitions");

    EnsembleStatistics stats{bins, std::vector<std::optional<double>>(h), std::vector<std::optional<double>>(h),
                             std::vector<std::size_t>(h, 0), std::vector<std::size_t>(h)};
    std::vector<double> column;
    for (std::size_t bin = 0; bin < h; ++bin) {
        column.clear();
        std::size_t min_pairs = std::numeric_limits<std::size_t>::max();
        for (const auto& e : estimates) {
            min_pairs = std::min(min_pairs, e.pair_counts.at(bin));
            if (const auto g = e.semivariogram(bin)) column.push_back(*g);
        }
        const auto m = moments(column);
        stats.mean[bin] = m.mean;
        stats.stddev[bin] = m.stddev;
        stats.samples[bin] = column.size();
        stats.pair_counts[bin] = min_pairs;
    }
    return stats;
}

EnsembleStatistics aggregate_statistics(std::span<const EnsembleStatistics> per_graph) {
    if (per_graph.empty()) throw std::invalid_argument("aggregate_statistics: no inputs");
    const BinPartition& bins = per_graph.front().bins;
    const std::size_t h = bins.size();
    for (const auto& s : per_graph)
        if (!(s.bins == bins)) throw std::invalid_argument("aggregate_statistics: inputs use different bin partitions");

    EnsembleStatistics stats{bins, std::vector<std::optional<double>>(h), std::vector<std::optional<double>>(h),
                             std::vector<std::size_t>(h, 0), std::vector<std::size_t>(h)};
    std::vector<double> column;
    for (std::size_t bin = 0; bin < h; ++bin) {
        column.clear();
        std::size_t min_pairs = std::numeric_limits<std::size_t>::max();
        for (const auto& s : per_graph) {
            min_pairs = std::min(min_pairs, s.pair_counts.at(bin));
            if (s.mean.at(bin)) column.push_back(*s.mean[bin]);
        }
        const auto m = moments(column);
        stats.mean[bin] = m.mean;
        stats.stddev[bin] = m.stddev;
        stats.samples[bin] = column.size();
        stats.pair_counts[bin] = min_pairs;
    }
    return stats;
}

// ---- Stationarity diagnostic ---------------------------------------------

StationarityScores stationarity_diagnostic(const Eigen::MatrixXd& signals, const SensorGraph& graph,
                                           const BinPartition& bins, const VertexWindow& window, unsigned threads) {
    require_length(signals.rows(), graph.size(), "stationarity_diagnostic");
    const auto n = static_cast<Eigen::Index>(graph.size());
    const auto h = static_cast<Eigen::Index>(bins.size());
    const std::size_t r = static_cast<std::size_t>(signals.cols());
    if (r < 1) throw std::invalid_argument("stationarity_diagnostic: empty ensemble");

    StationarityScores out{bins, Eigen::MatrixXd::Constant(n, h, kNaN), Eigen::MatrixXd::Constant(n, h, kNaN),
                           Eigen::VectorXd::Constant(h, kNaN)};
    Eigen::MatrixXd local_std = Eigen::MatrixXd::Constant(n, h, kNaN);
    // Per-realization global values in semivariogram units (R x H).
    Eigen::MatrixXd global_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), h);
    std::vector<std::size_t> defined(static_cast<std::size_t>(h), 0);

    const auto support = bin_support(graph, bins);
    std::optional<BinnedGraphFamily> shared;
    if (window.is_ones()) shared.emplace(support, Eigen::VectorXd::Ones(n), std::nullopt);

    Eigen::MatrixXd local(static_cast<Eigen::Index>(r), h);
    std::vector<double> column;
    for (Eigen::Index k = 0; k < n; ++k) {
        std::optional<BinnedGraphFamily> own;
        if (!shared) own.emplace(support, window.values(graph.sample(), static_cast<std::size_t>(k)),
                                 static_cast<std::size_t>(k));
        const BinnedGraphFamily& family = shared ? *shared : *own;
        local.setConstant(kNaN);
        parallel_for(r, threads, [&](std::size_t col) {
            const auto est = local_graph_variogram(signals.col(static_cast<Eigen::Index>(col)), family);
            for (Eigen::Index bin = 0; bin < h; ++bin)
                if (const auto g = est.semivariogram(static_cast<std::size_t>(bin)))
                    local(static_cast<Eigen::Index>(col), bin) = *g;
        });
        for (Eigen::Index bin = 0; bin < h; ++bin) {
            if (family.normalization(static_cast<std::size_t>(bin)) == 0.0) continue;
            ++defined[static_cast<std::size_t>(bin)];
            column.assign(local.col(bin).data(), local.col(bin).data() + r);
            const auto m = moments(column);
            out.local_mean(k, bin) = *m.mean;
            local_std(k, bin) = *m.stddev;
            global_sum.col(bin) += local.col(bin);
        }
        if (shared) {
            // Every centre shares the family, so the global value is the local one.
            for (Eigen::Index bin = 0; bin < h; ++bin) {
                if (family.normalization(static_cast<std::size_t>(bin)) == 0.0) continue;
                out.local_mean.col(bin).setConstant(out.local_mean(0, bin));
                local_std.col(bin).setConstant(local_std(0, bin));
                defined[static_cast<std::size_t>(bin)] = 1;
                global_sum.col(bin) = local.col(bin);
            }
            break;
        }
    }

    for (Eigen::Index bin = 0; bin < h; ++bin) {
        const std::size_t count = defined[static_cast<std::size_t>(bin)];
        if (count == 0) continue;
        column.resize(r);
        for (std::size_t col = 0; col < r; ++col)
            column[col] = global_sum(static_cast<Eigen::Index>(col), bin) / static_cast<double>(count);
        out.global_mean(bin) = *moments(column).mean;
    }

    const double sqrt_r = std::sqrt(static_cast<double>(r));
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index bin = 0; bin < h; ++bin) {
            const double lm = out.local_mean(k, bin);
            if (std::isnan(lm)) continue;
            const double diff = lm - out.global_mean(bin);
            const double se = local_std(k, bin) / sqrt_r;
            if (diff == 0.0) {
                out.scores(k, bin) = 0.0;
            } else {
                out.scores(k, bin) = diff / se;  // +-inf when the local values never vary
            }
        }
    }
    return out;
}

}  // namespace graphvario
