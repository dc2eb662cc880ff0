#include "ssg/linear_system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace ssg {

std::string to_fraction_string(const Rational& q)
{
    Rational c = q;
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational parse_fraction(std::string_view s)
{
    Rational q;
    if (q.set_str(std::string(s), 10) != 0) throw std::invalid_argument("not a fraction: " + std::string(s));
    q.canonicalize();
    return q;
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr std::array<u64, 12> kPrimes = {
    0x3fffffffffffffc7ULL, 0x3fffffffffffffa9ULL, 0x3fffffffffffff8bULL, 0x3fffffffffffff71ULL,
    0x3fffffffffffff67ULL, 0x3fffffffffffff59ULL, 0x3fffffffffffff55ULL, 0x3fffffffffffff3dULL,
    0x3fffffffffffff35ULL, 0x3ffffffffffffeefULL, 0x3ffffffffffffee1ULL, 0x3ffffffffffffec3ULL,
};

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }

u64 powmod(u64 a, u64 e, u64 p)
{
    u64 r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

u64 invmod(u64 a, u64 p) { return powmod(a, p - 2, p); }

u64 reduce(std::int64_t c, u64 p)
{
    const auto m = static_cast<std::int64_t>(p);
    std::int64_t r = c % m;
    return static_cast<u64>(r < 0 ? r + m : r);
}

u64 reduce(const mpz_class& z, u64 p)
{
    // p < 2^62 fits an unsigned long on LP64.
    return mpz_fdiv_ui(z.get_mpz_t(), static_cast<unsigned long>(p));
}

mpz_class to_mpz(u64 x)
{
    mpz_class z;
    mpz_import(z.get_mpz_t(), 1, 1, sizeof(u64), 0, 0, &x);
    return z;
}

// Solves A x = b mod p. Returns false when A is singular mod p; otherwise
// fills det and y = det * x.
bool solve_mod_p(const SparseSystem& sys, const std::vector<mpz_class>& b, u64 p, u64& det,
                 std::vector<u64>& y)
{
    const int k = sys.size();
    const int w = k + 1;
    std::vector<u64> m(static_cast<std::size_t>(k) * w, 0);
    for (int i = 0; i < k; ++i) {
        for (const auto& e : sys.rows[i]) {
            u64& cell = m[static_cast<std::size_t>(i) * w + e.col];
            cell = (cell + reduce(e.coef, p)) % p;
        }
        m[static_cast<std::size_t>(i) * w + k] = reduce(b[i], p);
    }

    det = 1;
    for (int col = 0; col < k; ++col) {
        int piv = -1;
        for (int r = col; r < k; ++r) {
            if (m[static_cast<std::size_t>(r) * w + col] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return false;
        u64* prow = &m[static_cast<std::size_t>(piv) * w];
        if (piv != col) {
            std::swap_ranges(prow, prow + w, &m[static_cast<std::size_t>(col) * w]);
            prow = &m[static_cast<std::size_t>(col) * w];
            det = (p - det) % p;
        }
        det = mulmod(det, prow[col], p);
        const u64 inv = invmod(prow[col], p);
        for (int c = col; c < w; ++c) prow[c] = mulmod(prow[c], inv, p);
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            u64* row = &m[static_cast<std::size_t>(r) * w];
            const u64 f = row[col];
            if (f == 0) continue;
            for (int c = col; c < w; ++c) {
                if (prow[c] == 0) continue;
                row[c] = (row[c] + p - mulmod(f, prow[c], p)) % p;
            }
        }
    }
    y.resize(k);
    for (int i = 0; i < k; ++i) y[i] = mulmod(m[static_cast<std::size_t>(i) * w + k], det, p);
    return true;
}

void crt_accumulate(mpz_class& acc, const mpz_class& modulus, u64 modulus_mod_p_inv, u64 residue, u64 p)
{
    const u64 cur = reduce(acc, p);
    const u64 diff = (residue + p - cur) % p;
    const u64 t = mulmod(diff, modulus_mod_p_inv, p);
    acc += modulus * to_mpz(t);
}

void verify_exact(const SparseSystem& sys, const std::vector<Rational>& x)
{
    for (int i = 0; i < sys.size(); ++i) {
        Rational lhs = 0;
        for (const auto& e : sys.rows[i]) lhs += Rational(static_cast<long>(e.coef)) * x[e.col];
        if (lhs != sys.rhs[i]) throw std::runtime_error("exact solve failed its residual check");
    }
}

}  // namespace

std::vector<Rational> solve_exact_modular(const SparseSystem& sys)
{
    const int k = sys.size();
    if (k == 0) return {};

    mpz_class lcm_den = 1;
    for (const auto& r : sys.rhs) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), r.get_den_mpz_t());
    std::vector<mpz_class> b(k);
    for (int i = 0; i < k; ++i) b[i] = sys.rhs[i].get_num() * (lcm_den / sys.rhs[i].get_den());

    // Hadamard bound on |det A| and on every Cramer numerator |det A_i(b)|.
    std::vector<double> col_sq(k, 0.0);
    for (const auto& row : sys.rows) {
        for (const auto& e : row) col_sq[e.col] += static_cast<double>(e.coef) * static_cast<double>(e.coef);
    }
    double log_det = 0.0;
    for (double s : col_sq) log_det += 0.5 * std::log2(std::max(1.0, s));
    std::size_t b_bits = 0;
    for (const auto& z : b) b_bits = std::max(b_bits, mpz_sizeinbase(z.get_mpz_t(), 2));
    const double log_b = static_cast<double>(b_bits) + 0.5 * std::log2(static_cast<double>(k));
    const double need_bits = log_det + std::max(0.0, log_b) + 8.0;

    std::vector<mpz_class> acc(k, 0);
    mpz_class det_acc = 0;
    mpz_class modulus = 1;
    std::vector<u64> y;
    u64 det_p = 0;
    std::size_t used = 0;
    for (u64 p : kPrimes) {
        if (!solve_mod_p(sys, b, p, det_p, y)) continue;
        const u64 inv = invmod(reduce(modulus, p), p);
        for (int i = 0; i < k; ++i) crt_accumulate(acc[i], modulus, inv, y[i], p);
        crt_accumulate(det_acc, modulus, inv, det_p, p);
        modulus *= to_mpz(p);
        ++used;
        if (static_cast<double>(mpz_sizeinbase(modulus.get_mpz_t(), 2)) > need_bits + 1.0) break;
    }
    if (used == 0 || static_cast<double>(mpz_sizeinbase(modulus.get_mpz_t(), 2)) <= need_bits + 1.0) {
        // Too large for the prime table (or singular); fall back.
        return solve_exact_elimination(sys);
    }

    const mpz_class half = modulus / 2;
    auto symmetric = [&](mpz_class& z) {
        if (z > half) z -= modulus;
    };
    symmetric(det_acc);
    if (det_acc == 0) throw std::runtime_error("singular linear system");

    std::vector<Rational> x(k);
    const mpz_class denom = det_acc * lcm_den;
    for (int i = 0; i < k; ++i) {
        symmetric(acc[i]);
        x[i] = Rational(acc[i], denom);
        x[i].canonicalize();
    }
    verify_exact(sys, x);
    return x;
}

std::vector<Rational> solve_exact_elimination(const SparseSystem& sys)
{
    const int k = sys.size();
    std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k + 1, 0));
    for (int i = 0; i < k; ++i) {
        for (const auto& e : sys.rows[i]) m[i][e.col] += static_cast<long>(e.coef);
        m[i][k] = sys.rhs[i];
    }
    for (int col = 0; col < k; ++col) {
        int piv = col;
        while (piv < k && m[piv][col] == 0) ++piv;
        if (piv == k) throw std::runtime_error("singular linear system");
        std::swap(m[piv], m[col]);
        for (int r = col + 1; r < k; ++r) {
            if (m[r][col] == 0) continue;
            const Rational f = m[r][col] / m[col][col];
            for (int c = col; c <= k; ++c) {
                if (m[col][c] != 0) m[r][c] -= f * m[col][c];
            }
        }
    }
    std::vector<Rational> x(k);
    for (int i = k - 1; i >= 0; --i) {
        Rational s = m[i][k];
        for (int c = i + 1; c < k; ++c) {
            if (m[i][c] != 0) s -= m[i][c] * x[c];
        }
        x[i] = s / m[i][i];
    }
    verify_exact(sys, x);
    return x;
}

std::vector<double> solve_float(const SparseSystem& sys)
{
    const int k = sys.size();
    if (k == 0) return {};
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b(k);
    for (int i = 0; i < k; ++i) {
        for (const auto& e : sys.rows[i]) trip.emplace_back(i, e.col, static_cast<double>(e.coef));
        b[i] = sys.rhs[i].get_d();
    }
    Eigen::SparseMatrix<double> a(k, k);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU factorization failed");
    Eigen::VectorXd x = lu.solve(b);
    const Eigen::VectorXd r = b - a * x;
    x += lu.solve(r);
    return {x.data(), x.data() + k};
}

double max_residual(const SparseSystem& sys, const std::vector<double>& x)
{
    double worst = 0.0;
    for (int i = 0; i < sys.size(); ++i) {
        double lhs = 0.0;
        for (const auto& e : sys.rows[i]) lhs += static_cast<double>(e.coef) * x[e.col];
        worst = std::max(worst, std::abs(lhs - sys.rhs[i].get_d()));
    }
    return worst;
}

}  // namespace ssg
