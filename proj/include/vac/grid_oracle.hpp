#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vac/basis.hpp"
#include "vac/errors.hpp"
#include "vac/parallel.hpp"
#include "vac/sde.hpp"
#include "vac/spectral_reference.hpp"

namespace vac {

// Reference operator for the double-well diffusion: a reversible hopping
// process on a rectangular grid whose generator is approximated by
// (24/eps^2)(P - I). Allowed moves from (x, y) are the four axis neighbors
// plus the two correlated diagonal neighbors (x+eps, y+eps), (x-eps, y-eps);
// each carries probability 1/(6(1 + exp[U(neighbor) - U(x,y)])) and the
// diagonal entry is the complement. Hops leaving the domain are rejected.
struct DoubleWellGridSpec {
    double x_min = -2.0, x_max = 2.0;
    double y_min = -5.0, y_max = 5.0;
    double spacing = 0.024494897427831781;  // sqrt(6e-4)
    Eigen::Index lanczos_iterations = 120;
    Eigen::Index power_per_apply = 0;       // 0: choose from spacing
    double sigma_residual_tol = 1e-3;

    std::string cache_key(Eigen::Index num_modes) const;
};

class DoubleWellGridOracle {
public:
    DoubleWellGridOracle(const DoubleWellGridSpec& spec, Eigen::Index num_modes,
                         bool solve = true)
        : spec_(spec), num_modes_(num_modes) {
        if (num_modes < 2) throw std::invalid_argument("grid reference: num_modes >= 2");
        if (!(spec.spacing > 0.0)) throw std::invalid_argument("grid reference: spacing > 0");
        build_grid();
        if (solve) solve_modes();
    }

    // Build with a disk cache for the eigen-solve; `cache_path` may be empty.
    static DoubleWellGridOracle cached(const DoubleWellGridSpec& spec, Eigen::Index num_modes,
                                       const std::string& cache_path);

    const SpectralReference& reference() const { return ref_; }
    const DoubleWellGridSpec& spec() const { return spec_; }
    Eigen::Index node_count() const { return n_nodes_; }
    double generator_scale() const { return 24.0 / (spec_.spacing * spec_.spacing); }
    const Eigen::VectorXd& stationary() const { return mu_; }

    // P applied from the left as a row vector (x^T P), reusing the symmetric
    // form: x^T P = (D^{1/2} S D^{-1/2} x)^T.
    Eigen::VectorXd left_apply(const Eigen::VectorXd& x) const {
        Eigen::VectorXd v = x.cwiseQuotient(sqrt_mu_);
        Eigen::VectorXd out(n_nodes_);
        apply_block(v.data(), out.data(), 1);
        return out.cwiseProduct(sqrt_mu_);
    }

    // P applied to each column of a node-block.
    Eigen::MatrixXd apply_p(const Eigen::MatrixXd& block) const {
        Eigen::MatrixXd v = sqrt_mu_.cwiseInverse().asDiagonal() * block;
        Eigen::MatrixXd out = apply_s_block(v);
        return sqrt_mu_.asDiagonal() * out;
    }

    // Row of P out of node z (dense; used by small-grid checks).
    Eigen::VectorXd p_row(Eigen::Index z) const {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n_nodes_);
        for (int m = 0; m < 7; ++m) {
            Eigen::Index t = idx_[m][z];
            double w = weight_[m][z];
            if (m == 6)
                row[z] += w;
            else if (t != z)
                row[t] += w * sqrt_mu_[t] / sqrt_mu_[z];  // undo symmetrization
        }
        return row;
    }

    // C_ij(tau) ~= phi_i^T D_mu P^m phi_j at m = round(tau * 24/eps^2), for a
    // whole ascending tau grid in one power walk. The walk stays in row-major
    // storage so the stencil streams each node's values contiguously.
    std::vector<Eigen::MatrixXd> ideal_correlation_sweep(const BasisSet& basis,
                                                         const std::vector<double>& taus) const {
        for (std::size_t i = 0; i + 1 < taus.size(); ++i)
            if (!(taus[i] < taus[i + 1]))
                throw std::invalid_argument("ideal_correlation_sweep: taus must be ascending");
        if (!taus.empty() && taus.front() < 0.0)
            throw std::invalid_argument("ideal_correlation_sweep: tau >= 0");
        Eigen::MatrixXd phi = basis_nodes(basis);
        Eigen::MatrixXd g = sqrt_mu_.asDiagonal() * phi;
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        RowMajor walk = g, scratch(n_nodes_, g.cols());
        std::vector<Eigen::MatrixXd> out;
        out.reserve(taus.size());
        long long step = 0;
        for (double tau : taus) {
            long long target = std::llround(tau * generator_scale());
            while (step < target) {
                apply_block(walk.data(), scratch.data(), g.cols());
                walk.swap(scratch);
                ++step;
            }
            Eigen::MatrixXd c = g.transpose() * Eigen::MatrixXd(walk);
            out.push_back(0.5 * (c + c.transpose()));
        }
        return out;
    }

    Eigen::MatrixXd ideal_correlation(const BasisSet& basis, double tau) const {
        return ideal_correlation_sweep(basis, {tau}).front();
    }

    // Node values of T_tau phi_j (P^m applied to basis columns).
    Eigen::MatrixXd transfer_on_basis(const BasisSet& basis, double tau) const {
        Eigen::MatrixXd phi = basis_nodes(basis);
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        RowMajor w = sqrt_mu_.asDiagonal() * phi, scratch(n_nodes_, phi.cols());
        long long target = std::llround(tau * generator_scale());
        for (long long s = 0; s < target; ++s) {
            apply_block(w.data(), scratch.data(), phi.cols());
            w.swap(scratch);
        }
        return sqrt_mu_.cwiseInverse().asDiagonal() * Eigen::MatrixXd(w);
    }

    Eigen::MatrixXd basis_nodes(const BasisSet& basis) const {
        Eigen::MatrixXd out(n_nodes_, basis.size());
        Eigen::VectorXd state(2);
        for (Eigen::Index z = 0; z < n_nodes_; ++z) {
            state[0] = ref_.nodes(z, 0);
            state[1] = ref_.nodes(z, 1);
            out.row(z) = basis.evaluate(state).transpose();
        }
        return out;
    }

    // Serialization of the solved modes (grid geometry is re-derived from the
    // spec; only the expensive eigen-solve output is stored).
    void save_modes(std::ostream& os) const {
        auto put = [&os](const double* p, std::size_t n) {
            os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 8));
        };
        std::int64_t r = ref_.sigmas.size();
        os.write(reinterpret_cast<const char*>(&r), 8);
        put(ref_.sigmas.data(), static_cast<std::size_t>(r));
        put(&ref_.tail_sigma, 1);
        put(ref_.eigenfunctions.data(), static_cast<std::size_t>(n_nodes_ * r));
    }

    bool load_modes(std::istream& is) {
        std::int64_t r = 0;
        is.read(reinterpret_cast<char*>(&r), 8);
        if (!is || r != num_modes_) return false;
        auto get = [&is](double* p, std::size_t n) {
            is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * 8));
        };
        ref_.sigmas.resize(r);
        get(ref_.sigmas.data(), static_cast<std::size_t>(r));
        get(&ref_.tail_sigma, 1);
        ref_.eigenfunctions.resize(n_nodes_, r);
        get(ref_.eigenfunctions.data(), static_cast<std::size_t>(n_nodes_ * r));
        return bool(is);
    }

private:
    void build_grid() {
        const double eps = spec_.spacing;
        nx_ = static_cast<Eigen::Index>(std::floor((spec_.x_max - spec_.x_min) / eps + 1e-9)) + 1;
        ny_ = static_cast<Eigen::Index>(std::floor((spec_.y_max - spec_.y_min) / eps + 1e-9)) + 1;
        n_nodes_ = nx_ * ny_;
        ref_.nodes.resize(n_nodes_, 2);
        Eigen::VectorXd pot(n_nodes_);
        for (Eigen::Index i = 0; i < nx_; ++i)
            for (Eigen::Index j = 0; j < ny_; ++j) {
                Eigen::Index z = i * ny_ + j;
                double x = spec_.x_min + static_cast<double>(i) * eps;
                double y = spec_.y_min + static_cast<double>(j) * eps;
                ref_.nodes(z, 0) = x;
                ref_.nodes(z, 1) = y;
                pot[z] = double_well_potential(x, y);
            }
        double pot_min = pot.minCoeff();
        mu_ = (-(pot.array() - pot_min)).exp();
        mu_ /= mu_.sum();
        sqrt_mu_ = mu_.cwiseSqrt();
        ref_.weights = mu_;

        // symmetrized edge weights sqrt(P(z,t) P(t,z)) per neighbor direction,
        // with self-index and zero weight for rejected (off-grid) moves
        const std::array<std::pair<int, int>, 6> moves{
            {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}}};
        for (int m = 0; m < 7; ++m) {
            idx_[m].assign(static_cast<std::size_t>(n_nodes_), 0);
            weight_[m].assign(static_cast<std::size_t>(n_nodes_), 0.0);
        }
        for (Eigen::Index i = 0; i < nx_; ++i)
            for (Eigen::Index j = 0; j < ny_; ++j) {
                Eigen::Index z = i * ny_ + j;
                double stay = 1.0;
                for (int m = 0; m < 6; ++m) {
                    Eigen::Index ii = i + moves[m].first;
                    Eigen::Index jj = j + moves[m].second;
                    if (ii < 0 || ii >= nx_ || jj < 0 || jj >= ny_) {
                        idx_[m][z] = z;
                        continue;
                    }
                    Eigen::Index t = ii * ny_ + jj;
                    double p_zt = 1.0 / (6.0 * (1.0 + std::exp(pot[t] - pot[z])));
                    double p_tz = 1.0 / (6.0 * (1.0 + std::exp(pot[z] - pot[t])));
                    idx_[m][z] = t;
                    weight_[m][z] = std::sqrt(p_zt * p_tz);
                    stay -= p_zt;
                }
                idx_[6][z] = z;
                weight_[6][z] = stay;
            }
    }

    // out = S v columnwise for an n_nodes x B block.
    Eigen::MatrixXd apply_s_block(const Eigen::MatrixXd& v) const {
        Eigen::MatrixXd out(n_nodes_, v.cols());
        const auto cols = v.cols();
        if (cols == 1) {
            apply_block(v.data(), out.data(), 1);
            return out;
        }
        // row-major staging so each node's values stay contiguous
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        RowMajor vr = v, outr(n_nodes_, cols);
        apply_block(vr.data(), outr.data(), cols);
        out = outr;
        return out;
    }

    template <int B>
    void apply_block_fixed(const double* v, double* out, Eigen::Index b) const {
        const Eigen::Index width = B > 0 ? B : b;
        parallel_for_blocks(n_nodes_, [&](Eigen::Index z0, Eigen::Index z1) {
            const double* wd = weight_[6].data();
            for (Eigen::Index z = z0; z < z1; ++z) {
                const double* src = v + z * width;
                double w = wd[z];
                double* dst = out + z * width;
                for (Eigen::Index c = 0; c < width; ++c) dst[c] = w * src[c];
            }
            for (int m = 0; m < 6; ++m) {
                const double* wm = weight_[m].data();
                const Eigen::Index* im = idx_[m].data();
                for (Eigen::Index z = z0; z < z1; ++z) {
                    double w = wm[z];
                    const double* src = v + im[z] * width;
                    double* dst = out + z * width;
                    for (Eigen::Index c = 0; c < width; ++c) dst[c] += w * src[c];
                }
            }
        });
    }

    void apply_block(const double* v, double* out, Eigen::Index b) const {
        if (b == 1)
            apply_block_fixed<1>(v, out, b);
        else if (b == 6)
            apply_block_fixed<6>(v, out, b);
        else
            apply_block_fixed<-1>(v, out, b);
    }

    void solve_modes();

    DoubleWellGridSpec spec_;
    Eigen::Index num_modes_;
    Eigen::Index nx_ = 0, ny_ = 0, n_nodes_ = 0;
    Eigen::VectorXd mu_, sqrt_mu_;
    std::array<std::vector<Eigen::Index>, 7> idx_;
    std::array<std::vector<double>, 7> weight_;
    SpectralReference ref_;
};

// Lanczos with full reorthogonalization on S^M; the power spreads the
// near-degenerate top of the spectrum so the leading Ritz pairs converge in
// few iterations.
inline void DoubleWellGridOracle::solve_modes() {
    const Eigen::Index want = std::min<Eigen::Index>(num_modes_ + 5, n_nodes_);
    Eigen::Index iters = std::min<Eigen::Index>(spec_.lanczos_iterations, n_nodes_);
    if (iters < want + 5)
        throw resolution_error("grid reference: grid too coarse for requested modes");
    Eigen::Index power = spec_.power_per_apply;
    if (power <= 0)
        power = std::max<Eigen::Index>(
            1, static_cast<Eigen::Index>(std::llround(0.005 * generator_scale())));
    if (power % 2 == 1) ++power;  // even power keeps the operator PSD

    auto op = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd cur = x, nxt(n_nodes_);
        for (Eigen::Index s = 0; s < power; ++s) {
            apply_block(cur.data(), nxt.data(), 1);
            cur.swap(nxt);
        }
        return cur;
    };

    Eigen::MatrixXd basis_v(n_nodes_, iters + 1);
    Eigen::VectorXd alpha(iters), beta(iters);
    // deterministic start vector biased toward the stationary mode
    Eigen::VectorXd v0 = sqrt_mu_;
    for (Eigen::Index z = 0; z < n_nodes_; ++z)
        v0[z] *= 1.0 + 0.5 * std::sin(static_cast<double>(z % 1009)) +
                 0.25 * std::cos(static_cast<double>(z % 131));
    v0.normalize();
    basis_v.col(0) = v0;
    Eigen::Index built = 0;
    for (Eigen::Index it = 0; it < iters; ++it) {
        Eigen::VectorXd w = op(basis_v.col(it));
        alpha[it] = basis_v.col(it).dot(w);
        w -= alpha[it] * basis_v.col(it);
        if (it > 0) w -= beta[it - 1] * basis_v.col(it - 1);
        // full reorthogonalization (twice)
        for (int pass = 0; pass < 2; ++pass)
            w -= basis_v.leftCols(it + 1) * (basis_v.leftCols(it + 1).transpose() * w);
        beta[it] = w.norm();
        built = it + 1;
        if (beta[it] < 1e-14) break;
        basis_v.col(it + 1) = w / beta[it];
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
    for (Eigen::Index i = 0; i < built; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < built) {
            tri(i, i + 1) = beta[i];
            tri(i + 1, i) = beta[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    if (built < want) throw resolution_error("grid reference: Lanczos space too small");

    const double scale = generator_scale();
    ref_.sigmas.resize(num_modes_);
    ref_.eigenfunctions.resize(n_nodes_, num_modes_);
    double prev_sigma = -1.0;
    for (Eigen::Index k = 0; k < want; ++k) {
        double theta = es.eigenvalues()[built - 1 - k];
        if (!(theta > 0.0))
            throw resolution_error("grid reference: nonpositive Ritz value in the leading block");
        double nu = std::pow(theta, 1.0 / static_cast<double>(power));
        double sigma = -scale * std::log(nu);
        Eigen::VectorXd w = basis_v.leftCols(built) * es.eigenvectors().col(built - 1 - k);
        w.normalize();
        // residual directly against S
        Eigen::VectorXd sw(n_nodes_);
        apply_block(w.data(), sw.data(), 1);
        double resid_sigma = (sw - nu * w).norm() * scale;
        if (resid_sigma > spec_.sigma_residual_tol * std::max(1.0, sigma))
            throw resolution_error("grid reference: eigen-residual above tolerance at mode " +
                                   std::to_string(k + 1));
        if (k == num_modes_) {
            ref_.tail_sigma = sigma;
            break;
        }
        if (k < num_modes_) {
            if (k == 0 && std::abs(sigma) < 1e-6) sigma = 0.0;  // stationary mode
            ref_.sigmas[k] = std::max(sigma, prev_sigma);       // guard rounding inversions
            prev_sigma = ref_.sigmas[k];
            Eigen::VectorXd eta = w.cwiseQuotient(sqrt_mu_);
            Eigen::Index imax = 0;
            eta.cwiseAbs().maxCoeff(&imax);
            if (eta[imax] < 0.0) eta = -eta;
            ref_.eigenfunctions.col(k) = eta;
        }
    }
}

inline std::string DoubleWellGridSpec::cache_key(Eigen::Index num_modes) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "dw_%.12g_%.12g_%.12g_%.12g_%.12g_m%lld_l%lld_p%lld",
                  x_min, x_max, y_min, y_max, spacing, static_cast<long long>(num_modes),
                  static_cast<long long>(lanczos_iterations),
                  static_cast<long long>(power_per_apply));
    // FNV-1a over the parameter string
    std::uint64_t h = 14695981039346656037ULL;
    for (const char* p = buf; *p; ++p) h = (h ^ static_cast<unsigned char>(*p)) * 1099511628211ULL;
    std::snprintf(buf, sizeof buf, "gridref_%016llx.bin", static_cast<unsigned long long>(h));
    return buf;
}

inline DoubleWellGridOracle DoubleWellGridOracle::cached(const DoubleWellGridSpec& spec,
                                                         Eigen::Index num_modes,
                                                         const std::string& cache_path) {
    DoubleWellGridOracle oracle(spec, num_modes, false);
    if (!cache_path.empty()) {
        std::ifstream in(cache_path, std::ios::binary);
        if (in && oracle.load_modes(in)) return oracle;
    }
    oracle.solve_modes();
    if (!cache_path.empty()) {
        std::ofstream out(cache_path, std::ios::binary);
        if (out) oracle.save_modes(out);
    }
    return oracle;
}

inline DoubleWellGridOracle double_well_grid_reference(const DoubleWellGridSpec& spec,
                                                       Eigen::Index num_modes) {
    return DoubleWellGridOracle(spec, num_modes);
}

inline Eigen::MatrixXd ideal_correlation_from_grid(const DoubleWellGridOracle& oracle,
                                                   const BasisSet& basis, double tau) {
    return oracle.ideal_correlation(basis, tau);
}

}  // namespace vac
