#include "mpcanet/mpca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpcanet/error.hpp"
#include "mpcanet/linalg.hpp"

namespace mpcanet {

void EnergyPolicy::validate() const {
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("energy threshold must lie in (0, 1], got " + std::to_string(q));
}

std::size_t select_mode_dims(std::span<const double> eigvals, double q, std::size_t floor) {
    if (eigvals.empty()) throw DimensionError("select_mode_dims: no eigenvalues");
    const std::size_t n = eigvals.size();
    const std::size_t lo = std::clamp<std::size_t>(floor, 1, n);

    double total = 0.0;
    for (auto v : eigvals) total += std::max(v, 0.0);
    if (total <= 0.0) return lo;

    double cum = 0.0;
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i) {
        cum += std::max(eigvals[i], 0.0);
        if (cum / total >= q) {
            p = i + 1;
            break;
        }
    }
    return std::max(p, lo);
}

namespace {

void require_samples(std::span<const DenseTensor> samples) {
    if (samples.size() < 2) throw DataError("fit_mpca: need at least 2 samples, got " + std::to_string(samples.size()));
    const auto& dims = samples.front().dims();
    for (std::size_t m = 1; m < samples.size(); ++m) {
        if (samples[m].dims() != dims) {
            throw DimensionError("fit_mpca: sample " + std::to_string(m) + " has dims " +
                                 shape_to_string(samples[m].dims()) + ", expected " + shape_to_string(dims));
        }
    }
}

DenseTensor sample_mean(std::span<const DenseTensor> samples) {
    DenseTensor mean(samples.front().dims());
    for (const auto& s : samples) mean += s;
    mean *= 1.0 / static_cast<double>(samples.size());
    return mean;
}

DenseTensor project_centered(const DenseTensor& centered, std::span<const DenseMatrix> factors) {
    DenseTensor out = centered;
    for (std::size_t n = 0; n < factors.size(); ++n) out = mode_multiply_transposed(out, factors[n], n);
    return out;
}

double total_scatter(std::span<const DenseTensor> centered, std::span<const DenseMatrix> factors) {
    double psi = 0.0;
    for (const auto& x : centered) psi += frobenius_sq_norm(project_centered(x, factors));
    return psi;
}

DenseMatrix leading_columns(const DenseMatrix& m, std::size_t k) {
    DenseMatrix out(m.rows(), k);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < k; ++c) out(r, c) = m(r, c);
    return out;
}

}  // namespace

DenseMatrix mode_scatter(std::span<const DenseTensor> centered, std::span<const DenseMatrix> factors,
                         std::size_t mode) {
    if (centered.empty()) throw DataError("mode_scatter: no samples");
    const std::size_t order = centered.front().order();
    if (!factors.empty() && factors.size() != order) throw DimensionError("mode_scatter: factor count != order");
    if (mode >= order) throw DimensionError("mode_scatter: mode out of range");

    const std::size_t extent = centered.front().extent(mode);
    DenseMatrix phi(extent, extent);
    for (const auto& x : centered) {
        DenseTensor y = x;
        if (!factors.empty())
            for (std::size_t k = 0; k < order; ++k)
                if (k != mode) y = mode_multiply_transposed(y, factors[k], k);
        // y unfolded along `mode` is (outer, extent, inner); accumulate A A^T directly.
        std::size_t outer = 1, inner = 1;
        for (std::size_t k = 0; k < mode; ++k) outer *= y.extent(k);
        for (std::size_t k = mode + 1; k < order; ++k) inner *= y.extent(k);
        const auto d = y.data();
        for (std::size_t o = 0; o < outer; ++o) {
            const double* block = d.data() + o * extent * inner;
            for (std::size_t i = 0; i < extent; ++i) {
                const double* ri = block + i * inner;
                for (std::size_t j = i; j < extent; ++j) {
                    const double* rj = block + j * inner;
                    double s = 0.0;
                    for (std::size_t r = 0; r < inner; ++r) s += ri[r] * rj[r];
                    phi(i, j) += s;
                }
            }
        }
    }
    for (std::size_t i = 0; i < extent; ++i)
        for (std::size_t j = 0; j < i; ++j) phi(i, j) = phi(j, i);
    return phi;
}

MpcaModel fit_mpca(std::span<const DenseTensor> samples, const MpcaFitOptions& options, MpcaFitTrace* trace) {
    require_samples(samples);
    options.energy.validate();
    if (options.max_iter < 0) throw ConfigError("fit_mpca: max_iter must be non-negative");

    MpcaModel model;
    model.input_dims = samples.front().dims();
    model.mean = sample_mean(samples);
    const std::size_t order = model.input_dims.size();

    std::vector<DenseTensor> centered;
    centered.reserve(samples.size());
    for (const auto& s : samples) centered.push_back(s - model.mean);

    // Full-projection initialization: eigenvectors of each mode scatter with
    // no other-mode projection. These eigenvalues also fix P_n.
    std::vector<DenseMatrix> full_vectors;
    model.output_dims.resize(order);
    for (std::size_t n = 0; n < order; ++n) {
        auto eig = symmetric_eigen(mode_scatter(centered, {}, n));
        model.output_dims[n] = select_mode_dims(eig.values, options.energy.q, options.energy.floor_for(n));
        model.mode_eigenvalues.push_back(std::move(eig.values));
        full_vectors.push_back(std::move(eig.vectors));
    }

    const std::size_t max_core = shape_volume(model.input_dims);
    if (options.min_core_size > max_core) {
        throw ConfigError("fit_mpca: " + std::to_string(options.min_core_size) +
                          " core coordinates requested but the full core of " + shape_to_string(model.input_dims) +
                          " has only " + std::to_string(max_core));
    }
    while (shape_volume(model.output_dims) < options.min_core_size) {
        std::size_t best = order;
        for (std::size_t n = 0; n < order; ++n) {
            if (model.output_dims[n] >= model.input_dims[n]) continue;
            if (best == order ||
                model.mode_eigenvalues[n][model.output_dims[n]] > model.mode_eigenvalues[best][model.output_dims[best]])
                best = n;
        }
        ++model.output_dims[best];
    }

    for (std::size_t n = 0; n < order; ++n)
        model.factors.push_back(leading_columns(full_vectors[n], model.output_dims[n]));

    double psi = total_scatter(centered, model.factors);
    MpcaFitTrace local;
    local.scatter.push_back(psi);

    for (int iter = 0; iter < options.max_iter; ++iter) {
        if (psi <= 0.0) {
            local.converged = true;
            break;
        }
        for (std::size_t n = 0; n < order; ++n) {
            auto eig = symmetric_eigen(mode_scatter(centered, model.factors, n));
            model.factors[n] = leading_columns(eig.vectors, model.output_dims[n]);
        }
        const double next = total_scatter(centered, model.factors);
        local.scatter.push_back(next);
        const double change = std::abs(next - psi) / psi;
        psi = next;
        if (change < options.tol) {
            local.converged = true;
            break;
        }
    }
    model.captured_scatter = psi;
    if (trace) *trace = std::move(local);
    return model;
}

DenseTensor project(const MpcaModel& model, const DenseTensor& t) {
    if (t.dims() != model.input_dims) {
        throw DimensionError("project: tensor dims " + shape_to_string(t.dims()) + " != model input dims " +
                             shape_to_string(model.input_dims));
    }
    return project_centered(t - model.mean, model.factors);
}

DenseTensor reconstruct(const MpcaModel& model, const DenseTensor& core) {
    if (core.dims() != model.output_dims) throw DimensionError("reconstruct: core dims mismatch");
    DenseTensor out = core;
    for (std::size_t n = 0; n < model.factors.size(); ++n) out = mode_multiply(out, model.factors[n], n);
    return out + model.mean;
}

std::vector<std::size_t> compute_variance_order(MpcaModel& model, std::span<const DenseTensor> samples) {
    if (samples.empty()) throw DataError("compute_variance_order: no samples");
    const std::size_t p = model.core_size();
    std::vector<double> sum(p, 0.0);
    std::vector<DenseTensor> cores;
    cores.reserve(samples.size());
    for (const auto& s : samples) {
        cores.push_back(project(model, s));
        const auto c = cores.back().data();
        for (std::size_t k = 0; k < p; ++k) sum[k] += c[k];
    }
    const double inv_m = 1.0 / static_cast<double>(samples.size());
    std::vector<double> var(p, 0.0);
    for (const auto& core : cores) {
        const auto c = core.data();
        for (std::size_t k = 0; k < p; ++k) {
            const double d = c[k] - sum[k] * inv_m;
            var[k] += d * d;
        }
    }
    for (auto& v : var) v *= inv_m;

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });
    model.variance_order = order;
    return order;
}

std::vector<double> vectorize_core(const MpcaModel& model, const DenseTensor& core) {
    if (model.variance_order.empty()) throw DataError("vectorize_core: variance order has not been computed");
    if (core.dims() != model.output_dims) throw DimensionError("vectorize_core: core dims mismatch");
    std::vector<double> out(model.variance_order.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = core[model.variance_order[k]];
    return out;
}

DenseTensor unvectorize_core(const MpcaModel& model, std::span<const double> vec) {
    if (model.variance_order.empty()) throw DataError("unvectorize_core: variance order has not been computed");
    if (vec.size() != model.variance_order.size()) throw DimensionError("unvectorize_core: length mismatch");
    DenseTensor core(model.output_dims);
    for (std::size_t k = 0; k < vec.size(); ++k) core[model.variance_order[k]] = vec[k];
    return core;
}

}  // namespace mpcanet
