#include "roughns/spectral.hpp"

#include "roughns/errors.hpp"
#include "roughns/io.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <random>

namespace roughns {

namespace {

struct MultiplierCache {
    std::mutex mu;
    std::map<double, std::vector<double>> table;
};

std::map<int, std::shared_ptr<MultiplierCache>>& multiplier_caches() {
    static std::map<int, std::shared_ptr<MultiplierCache>> caches;
    return caches;
}

std::mutex& fftw_mutex() {
    static std::mutex mu;
    return mu;
}

}  // namespace

Lattice::Lattice(int cutoff) {
    if (cutoff < 1) throw Error(ErrorKind::invalid_parameter, "lattice cutoff must be at least 1");
    auto d = std::make_shared<Data>();
    d->cutoff = cutoff;
    d->side = static_cast<std::size_t>(2 * cutoff + 1);
    d->modes.reserve(d->side * d->side * d->side);
    for (int kx = -cutoff; kx <= cutoff; ++kx)
        for (int ky = -cutoff; ky <= cutoff; ++ky)
            for (int kz = -cutoff; kz <= cutoff; ++kz) {
                d->modes.push_back({kx, ky, kz});
                d->k2.push_back(static_cast<double>(kx * kx + ky * ky + kz * kz));
            }
    data_ = std::move(d);
}

bool Lattice::contains(const Mode& k) const {
    const int n = cutoff();
    return std::abs(k[0]) <= n && std::abs(k[1]) <= n && std::abs(k[2]) <= n;
}

std::size_t Lattice::index(const Mode& k) const {
    const auto n = static_cast<std::size_t>(cutoff());
    const std::size_t s = side();
    return ((static_cast<std::size_t>(k[0]) + n) * s + (static_cast<std::size_t>(k[1]) + n)) * s +
           (static_cast<std::size_t>(k[2]) + n);
}

bool Lattice::canonical(std::size_t idx) const {
    const Mode& k = mode(idx);
    if (k[0] != 0) return k[0] > 0;
    if (k[1] != 0) return k[1] > 0;
    return k[2] > 0;
}

const std::vector<double>& Lattice::multiplier(double beta) const {
    static std::mutex registry_mu;
    std::shared_ptr<MultiplierCache> cache;
    {
        const std::lock_guard<std::mutex> lock(registry_mu);
        auto& slot = multiplier_caches()[cutoff()];
        if (!slot) slot = std::make_shared<MultiplierCache>();
        cache = slot;
    }
    const std::lock_guard<std::mutex> lock(cache->mu);
    auto it = cache->table.find(beta);
    if (it == cache->table.end()) {
        std::vector<double> w(size());
        for (std::size_t i = 0; i < size(); ++i) w[i] = std::pow(1.0 + k2(i), 0.5 * beta);
        it = cache->table.emplace(beta, std::move(w)).first;
    }
    return it->second;
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(const Lattice& lattice) : lattice_(lattice), c_(lattice.size(), Vec3c{}) {}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (int a = 0; a < 3; ++a) c_[i][a] += o.c_[i][a];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (int a = 0; a < 3; ++a) c_[i][a] -= o.c_[i][a];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& v : c_)
        for (auto& x : v) x *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (int a = 0; a < 3; ++a) c_[i][a] += s * o.c_[i][a];
    return *this;
}

void SpectralField::set_zero() { std::fill(c_.begin(), c_.end(), Vec3c{}); }

bool SpectralField::is_finite() const {
    for (const auto& v : c_)
        for (const auto& x : v)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double sobolev_inner(const SpectralField& f, const SpectralField& g, double beta) {
    const auto& w = f.lattice().multiplier(2.0 * beta);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) s += (std::conj(f[i][a]) * g[i][a]).real();
        acc += w[i] * s;
    }
    return torus_volume * acc;
}

double inner(const SpectralField& a, const SpectralField& b) { return sobolev_inner(a, b, 0.0); }

double sobolev_norm(const SpectralField& f, double beta) {
    const auto& w = f.lattice().multiplier(2.0 * beta);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * (std::norm(f[i][0]) + std::norm(f[i][1]) + std::norm(f[i][2]));
    return std::sqrt(torus_volume * acc);
}

double divergence_residual(const SpectralField& f) {
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Mode& k = f.lattice().mode(i);
        const cplx d = static_cast<double>(k[0]) * f[i][0] + static_cast<double>(k[1]) * f[i][1] +
                       static_cast<double>(k[2]) * f[i][2];
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

double conjugate_symmetry_residual(const SpectralField& f) {
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::size_t j = f.lattice().negated(i);
        for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(f[j][a] - std::conj(f[i][a])));
    }
    return worst;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(a[i][c] - b[i][c]));
    return worst;
}

SpectralField leray_project(const SpectralField& f) {
    SpectralField out = f;
    const Lattice& L = f.lattice();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double k2 = L.k2(i);
        if (k2 == 0.0) continue;
        const Mode& k = L.mode(i);
        const cplx kd = (static_cast<double>(k[0]) * f[i][0] + static_cast<double>(k[1]) * f[i][1] +
                         static_cast<double>(k[2]) * f[i][2]) / k2;
        for (int a = 0; a < 3; ++a) out[i][a] = f[i][a] - static_cast<double>(k[a]) * kd;
    }
    return out;
}

SpectralField q_project(const SpectralField& f) { return f - leray_project(f); }

SpectralField smoothing(const SpectralField& f, double eta) {
    if (!(eta > 0.0) || !(eta <= 1.0)) throw Error(ErrorKind::invalid_parameter, "smoothing parameter must lie in (0, 1]");
    SpectralField out = f;
    const double e2 = eta * eta;
    for (std::size_t i = 0; i < f.size(); ++i)
        if ((1.0 + f.lattice().k2(i)) * e2 > 1.0 + 1e-12) out[i] = Vec3c{};
    return out;
}

SpectralField heat_propagate(const SpectralField& f, double t, double nu) {
    SpectralField out = f;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double m = std::exp(-nu * f.lattice().k2(i) * t);
        for (auto& x : out[i]) x *= m;
    }
    return out;
}

SpectralField bessel_potential(const SpectralField& f, double s) {
    SpectralField out = f;
    const auto& w = f.lattice().multiplier(s);
    for (std::size_t i = 0; i < f.size(); ++i)
        for (auto& x : out[i]) x *= w[i];
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out = f;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (auto& x : out[i]) x *= -f.lattice().k2(i);
    return out;
}

SpectralField restrict_to(const SpectralField& f, const Lattice& target) {
    SpectralField out(target);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Mode& k = f.lattice().mode(i);
        if (target.contains(k)) out.at(k) = f[i];
    }
    return out;
}

SpectralField trig_field(const Lattice& lattice, const Mode& k, const std::array<double, 3>& a_cos,
                         const std::array<double, 3>& a_sin) {
    if (!lattice.contains(k)) throw Error(ErrorKind::invalid_parameter, "mode outside the lattice");
    SpectralField f(lattice);
    if (k == Mode{0, 0, 0}) {
        for (int a = 0; a < 3; ++a) f.at(k)[a] = a_cos[a];
        return f;
    }
    const Mode mk{-k[0], -k[1], -k[2]};
    for (int a = 0; a < 3; ++a) {
        const cplx c(0.5 * a_cos[a], -0.5 * a_sin[a]);
        f.at(k)[a] += c;
        f.at(mk)[a] += std::conj(c);
    }
    return f;
}

SpectralField random_field(const Lattice& lattice, std::uint64_t seed, int max_mode, bool divergence_free,
                           double norm) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    SpectralField f(lattice);
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        if (!lattice.canonical(i)) continue;
        const Mode& k = lattice.mode(i);
        Vec3c v;
        for (auto& x : v) x = cplx(g(rng), g(rng));
        if (std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}) > max_mode) continue;
        f[i] = v;
        for (int a = 0; a < 3; ++a) f[lattice.negated(i)][a] = std::conj(v[a]);
    }
    if (divergence_free) f = leray_project(f);
    if (norm > 0.0) {
        const double cur = sobolev_norm(f, 0.0);
        if (cur > 0.0) f *= norm / cur;
    }
    return f;
}

void write_csv(std::ostream& os, const SpectralField& f) {
    os << "kx,ky,kz,re_1,im_1,re_2,im_2,re_3,im_3\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Mode& k = f.lattice().mode(i);
        os << k[0] << ',' << k[1] << ',' << k[2];
        for (int a = 0; a < 3; ++a) os << ',' << format_double(f[i][a].real()) << ',' << format_double(f[i][a].imag());
        os << '\n';
    }
}

SpectralField read_field_csv(std::istream& is, int min_cutoff) {
    const CsvTable t = read_csv(is);
    const std::vector<std::string> expected = {"kx", "ky", "kz", "re_1", "im_1", "re_2", "im_2", "re_3", "im_3"};
    if (t.header != expected) throw Error(ErrorKind::invalid_input, "field csv needs columns kx,ky,kz,re_1,...,im_3");
    int n = std::max(1, min_cutoff);
    for (const auto& r : t.rows) {
        for (int a = 0; a < 3; ++a) {
            if (r[a] != std::round(r[a])) throw Error(ErrorKind::invalid_input, "field csv modes must be integers");
            n = std::max(n, static_cast<int>(std::abs(r[a])));
        }
    }
    SpectralField f{Lattice(n)};
    for (const auto& r : t.rows) {
        const Mode k{static_cast<int>(r[0]), static_cast<int>(r[1]), static_cast<int>(r[2])};
        for (int a = 0; a < 3; ++a) f.at(k)[a] = cplx(r[3 + 2 * a], r[4 + 2 * a]);
    }
    if (!f.is_finite()) throw Error(ErrorKind::invalid_input, "field csv has non-finite coefficients");
    return f;
}

// ---------------------------------------------------------------------------
// Products

namespace {

std::size_t smooth_size_at_least(std::size_t m) {
    for (std::size_t s = m;; ++s) {
        std::size_t r = s;
        for (std::size_t p : {2u, 3u, 5u})
            while (r % p == 0) r /= p;
        if (r == 1) return s;
    }
}

}  // namespace

struct ProductEngine::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::size_t real_size = 0;
    std::size_t spec_size = 0;

    ~Plans() {
        const std::lock_guard<std::mutex> lock(fftw_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
    }
};

ProductEngine::ProductEngine(const Lattice& lattice)
    : lattice_(lattice), m_(smooth_size_at_least(3 * static_cast<std::size_t>(lattice.cutoff()) + 1)),
      plans_(std::make_unique<Plans>()) {
    const int m = static_cast<int>(m_);
    const std::size_t half = m_ / 2 + 1;
    plans_->real_size = m_ * m_ * m_;
    plans_->spec_size = m_ * m_ * half;
    {
        const std::lock_guard<std::mutex> lock(fftw_mutex());
        plans_->real = fftw_alloc_real(plans_->real_size);
        plans_->spec = fftw_alloc_complex(plans_->spec_size);
        plans_->forward = fftw_plan_dft_r2c_3d(m, m, m, plans_->real, plans_->spec, FFTW_ESTIMATE);
        plans_->backward = fftw_plan_dft_c2r_3d(m, m, m, plans_->spec, plans_->real, FFTW_ESTIMATE);
    }
    if (!plans_->forward || !plans_->backward) throw Error(ErrorKind::invalid_input, "transform planning failed");
    slot_.assign(lattice.size(), 0);
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const Mode& k = lattice.mode(i);
        if (k[2] < 0) continue;
        const std::size_t x = static_cast<std::size_t>((k[0] + m) % m);
        const std::size_t y = static_cast<std::size_t>((k[1] + m) % m);
        slot_[i] = (x * m_ + y) * half + static_cast<std::size_t>(k[2]);
    }
}

ProductEngine::~ProductEngine() = default;

void ProductEngine::to_physical(const SpectralField& f, std::size_t comp, int axis, std::vector<double>& out) {
    std::fill(plans_->spec[0], plans_->spec[0] + 2 * plans_->spec_size, 0.0);
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
        const Mode& k = lattice_.mode(i);
        if (k[2] < 0) continue;
        cplx v = f[i][comp];
        if (axis >= 0) v *= cplx(0.0, static_cast<double>(k[axis]));
        plans_->spec[slot_[i]][0] = v.real();
        plans_->spec[slot_[i]][1] = v.imag();
    }
    fftw_execute(plans_->backward);
    out.assign(plans_->real, plans_->real + plans_->real_size);
}

void ProductEngine::to_spectral(const std::vector<double>& phys, std::vector<cplx>& coeffs) {
    std::copy(phys.begin(), phys.end(), plans_->real);
    fftw_execute(plans_->forward);
    const double scale = 1.0 / static_cast<double>(plans_->real_size);
    coeffs.assign(lattice_.size(), cplx{});
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
        const Mode& k = lattice_.mode(i);
        const bool take = k[2] > 0 || (k[2] == 0 && lattice_.canonical(i));
        if (!take) continue;
        const cplx v(plans_->spec[slot_[i]][0] * scale, plans_->spec[slot_[i]][1] * scale);
        coeffs[i] = v;
        coeffs[lattice_.negated(i)] = std::conj(v);
    }
    const std::size_t zero = lattice_.index({0, 0, 0});
    coeffs[zero] = cplx(plans_->spec[0][0] * scale, 0.0);
}

SpectralField ProductEngine::advect(const SpectralField& u, const SpectralField& v) {
    std::array<std::vector<double>, 3> up;
    for (std::size_t j = 0; j < 3; ++j) to_physical(u, j, -1, up[j]);
    SpectralField out(lattice_);
    std::vector<double> grad, acc(plans_->real_size);
    std::vector<cplx> coeffs;
    for (std::size_t i = 0; i < 3; ++i) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int j = 0; j < 3; ++j) {
            to_physical(v, i, j, grad);
            const auto& uj = up[static_cast<std::size_t>(j)];
            for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += uj[p] * grad[p];
        }
        to_spectral(acc, coeffs);
        for (std::size_t q = 0; q < lattice_.size(); ++q) out[q][i] = coeffs[q];
    }
    return out;
}

SpectralField ProductEngine::convect(const SpectralField& u) {
    std::array<std::vector<double>, 3> up;
    for (std::size_t j = 0; j < 3; ++j) to_physical(u, j, -1, up[j]);
    SpectralField out(lattice_);
    std::vector<double> prod(plans_->real_size);
    std::vector<cplx> coeffs;
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a; b < 3; ++b) {
            for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = up[a][p] * up[b][p];
            to_spectral(prod, coeffs);
            // d_b (u_a u_b) feeds component a; d_a (u_a u_b) feeds component b.
            for (std::size_t q = 0; q < lattice_.size(); ++q) {
                const Mode& k = lattice_.mode(q);
                const cplx t = coeffs[q];
                out[q][a] += cplx(0.0, static_cast<double>(k[b])) * t;
                if (b != a) out[q][b] += cplx(0.0, static_cast<double>(k[a])) * t;
            }
        }
    return out;
}

ProductEngine& product_engine(const Lattice& lattice) {
    thread_local std::map<int, std::unique_ptr<ProductEngine>> engines;
    auto& slot = engines[lattice.cutoff()];
    if (!slot) slot = std::make_unique<ProductEngine>(lattice);
    return *slot;
}

double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    return inner(product_engine(u.lattice()).advect(u, v), w);
}

Convection convection_parts(const SpectralField& u) {
    SpectralField b = product_engine(u.lattice()).convect(u);
    SpectralField p = leray_project(b);
    return Convection{p, b - p};
}

SpectralField convection(const SpectralField& u) { return leray_project(product_engine(u.lattice()).convect(u)); }

}  // namespace roughns
