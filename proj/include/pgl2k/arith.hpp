#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgl2k/fields.hpp"

namespace pgl2k {

// Value of a quaternion symbol in Br(K): trivial ("split") or not.
struct SymbolValue {
    bool split = true;
    bool operator==(const SymbolValue& o) const { return split == o.split; }
    std::string to_string() const { return split ? "split" : "non-split"; }
};

// A place of Q: the real place, 2, or an odd prime.
class Place {
public:
    static Place infinity() { return Place(true, 0); }
    static Place prime(Int p) {
        if (p < 2) throw bad_field_spec("place must be a prime or infinity");
        return Place(false, std::move(p));
    }
    bool is_infinity() const { return infinite_; }
    const Int& p() const { return p_; }
    std::string to_string() const { return infinite_ ? "oo" : p_.str(); }

private:
    Place(bool inf, Int p) : infinite_(inf), p_(std::move(p)) {}
    bool infinite_;
    Int p_;
};

namespace detail {

inline int jacobi(Int a, Int n) {
    // n odd positive
    a %= n;
    if (a < 0) a += n;
    int result = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            Int m = n % 8;
            if (m == 3 || m == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

// (value, exponent of p removed)
inline std::pair<Int, int> split_prime(Int v, const Int& p) {
    int e = 0;
    while (v % p == 0) { v /= p; ++e; }
    return {v, e};
}

// reduce a nonzero rational to the signed squarefree integer representing its
// square class
inline Int squarefree_of(const Rational& r) {
    return squarefree_part(Int(numerator(r) * denominator(r)));
}

} // namespace detail

// Local Hilbert symbol (a, b)_v over Q, standard formulas.
inline SymbolValue hilbert_symbol_local(const Place& v, const Rational& a, const Rational& b) {
    if (a == 0 || b == 0) throw zero_input("hilbert symbol arguments must be nonzero");
    Int sa = detail::squarefree_of(a);
    Int sb = detail::squarefree_of(b);
    if (v.is_infinity())
        return SymbolValue{!(sa < 0 && sb < 0)};
    const Int& p = v.p();
    auto [u, alpha] = detail::split_prime(sa, p);
    auto [w, beta] = detail::split_prime(sb, p);
    int sign = 1;
    if (p == 2) {
        auto eps = [](const Int& x) { return static_cast<int>(((x - 1) / 2) % 2 != 0); };
        auto omega = [](const Int& x) { return static_cast<int>(((x * x - 1) / 8) % 2 != 0); };
        int e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
        sign = (e % 2 == 0) ? 1 : -1;
    } else {
        int e = alpha * beta * static_cast<int>(((p - 1) / 2) % 2);
        sign = (e % 2 == 0) ? 1 : -1;
        if (beta % 2 != 0) sign *= detail::jacobi(u, p);
        if (alpha % 2 != 0) sign *= detail::jacobi(w, p);
    }
    return SymbolValue{sign == 1};
}

// Global symbol (alpha, beta)_2 in Br(K): split iff x^2 - alpha y^2 - beta z^2
// has a nonzero K-point. Over an odd finite field every symbol splits; over Q
// it is the product of the local symbols.
inline SymbolValue hilbert_symbol(const FieldDesc& f, const Elem& alpha, const Elem& beta) {
    if (alpha.is_zero() || beta.is_zero())
        throw zero_input("hilbert symbol arguments must be nonzero");
    if (alpha.field() != f || beta.field() != f)
        throw field_mismatch("hilbert_symbol arguments not in the given field");
    if (f.is_finite()) {
        if (f.characteristic() == 2)
            throw unsupported_field("hilbert symbol needs odd characteristic");
        return SymbolValue{true};
    }
    const Rational& a = alpha.rational_value();
    const Rational& b = beta.rational_value();
    Int sa = detail::squarefree_of(a), sb = detail::squarefree_of(b);
    int sign = hilbert_symbol_local(Place::infinity(), a, b).split ? 1 : -1;
    sign *= hilbert_symbol_local(Place::prime(2), a, b).split ? 1 : -1;
    std::vector<Int> primes;
    for (const auto& [p, e] : detail::factorize(sa))
        if (p != 2) primes.push_back(p);
    for (const auto& [p, e] : detail::factorize(sb))
        if (p != 2 && std::find(primes.begin(), primes.end(), p) == primes.end())
            primes.push_back(p);
    for (const auto& p : primes)
        sign *= hilbert_symbol_local(Place::prime(p), a, b).split ? 1 : -1;
    return SymbolValue{sign == 1};
}

// Solve lambda^2 - alpha - beta mu^2 = 0 with mu != 0. Finite fields are
// searched exhaustively; over Q, mu = m/n is enumerated by increasing height
// max(|m|, n) up to height_cap and lambda^2 tested for squareness.
inline std::pair<Elem, Elem> solve_conic(const FieldDesc& f, const Elem& alpha, const Elem& beta,
                                         std::int64_t height_cap = 1000) {
    if (alpha.is_zero() || beta.is_zero())
        throw zero_input("solve_conic arguments must be nonzero");
    if (!hilbert_symbol(f, alpha, beta).split)
        throw no_solution("the symbol (" + alpha.to_string() + "," + beta.to_string() +
                          ") does not vanish: the conic has no point");
    if (f.is_finite()) {
        const std::int64_t q = f.order();
        for (std::int64_t li = 0; li < q; ++li) {
            Elem lam = f.element_at(li);
            Elem lhs = lam * lam - alpha;
            for (std::int64_t mi = 1; mi < q; ++mi) {
                Elem mu = f.element_at(mi);
                if (lhs == beta * mu * mu) return {lam, mu};
            }
        }
        throw search_exhausted("no solution with mu != 0 in " + f.to_string());
    }
    const Rational a = alpha.rational_value(), b = beta.rational_value();
    auto try_mu = [&](const Rational& mu) -> std::optional<std::pair<Elem, Elem>> {
        Rational lam2 = a + b * mu * mu;
        if (lam2 < 0) return std::nullopt;
        if (lam2 == 0) return std::make_pair(f.from_rational(0), f.from_rational(mu));
        Elem cand(f, lam2);
        if (auto root = is_square(cand))
            return std::make_pair(*root, f.from_rational(mu));
        return std::nullopt;
    };
    for (std::int64_t h = 1; h <= height_cap; ++h) {
        // denominators h first (m = 1..h), then numerators h (n = 1..h-1)
        for (std::int64_t m = 1; m <= h; ++m) {
            if (std::gcd(m, h) != 1) continue;
            for (int s : {1, -1}) {
                if (auto r = try_mu(Rational(s * m, h))) return *r;
            }
        }
        for (std::int64_t n = 1; n < h; ++n) {
            if (std::gcd(h, n) != 1) continue;
            for (int s : {1, -1}) {
                if (auto r = try_mu(Rational(s * h, n))) return *r;
            }
        }
    }
    throw search_exhausted("conic is split but no mu != 0 solution found up to height " +
                           std::to_string(height_cap));
}

// The r^2-dimensional cyclic algebra with x^r = alpha, y^r = beta, yx = zeta xy.
// Elements are coefficient vectors on the basis x^i y^j (index i*r + j).
class CyclicAlgebra {
public:
    CyclicAlgebra(FieldDesc field, int r, Elem alpha, Elem beta, Elem zeta)
        : field_(std::move(field)), r_(r), alpha_(std::move(alpha)), beta_(std::move(beta)),
          zeta_(std::move(zeta)) {
        if (r_ < 2) throw bad_field_spec("cyclic algebra needs r >= 2");
        build_table();
        verify_relations();
        if (r_ <= 5) verify_associativity();
    }

    int r() const { return r_; }
    const FieldDesc& field() const { return field_; }
    const Elem& alpha() const { return alpha_; }
    const Elem& beta() const { return beta_; }
    const Elem& zeta() const { return zeta_; }
    int dimension() const { return r_ * r_; }

    // product of basis elements x^i y^j and x^k y^l: coefficient and target index
    std::pair<Elem, int> basis_product(int i, int j, int k, int l) const {
        const auto& e = table_[idx(i, j)][idx(k, l)];
        return {e.first, e.second};
    }

    std::vector<Elem> element(std::initializer_list<std::pair<int, Elem>> terms) const {
        std::vector<Elem> v(dimension(), field_.zero());
        for (const auto& [index, c] : terms) v[index] = c;
        return v;
    }

    std::vector<Elem> multiply(const std::vector<Elem>& u, const std::vector<Elem>& v) const {
        std::vector<Elem> out(dimension(), field_.zero());
        for (int a = 0; a < dimension(); ++a) {
            if (u[a].is_zero()) continue;
            for (int b = 0; b < dimension(); ++b) {
                if (v[b].is_zero()) continue;
                const auto& [c, target] = table_[a][b];
                out[target] = out[target] + u[a] * v[b] * c;
            }
        }
        return out;
    }

    int idx(int i, int j) const { return detail::mod_reduce(i, r_) * r_ + detail::mod_reduce(j, r_); }

private:
    void build_table() {
        const int d = dimension();
        table_.assign(d, std::vector<std::pair<Elem, int>>(d, {field_.zero(), 0}));
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < r_; ++j)
                for (int k = 0; k < r_; ++k)
                    for (int l = 0; l < r_; ++l) {
                        // (x^i y^j)(x^k y^l) = zeta^{jk} x^{i+k} y^{j+l}
                        Elem c = zeta_.pow(static_cast<std::int64_t>(j) * k);
                        if (i + k >= r_) c = c * alpha_;
                        if (j + l >= r_) c = c * beta_;
                        table_[idx(i, j)][idx(k, l)] = {c, idx(i + k, j + l)};
                    }
    }

    void verify_relations() {
        // x^r = alpha, y^r = beta, yx = zeta xy, zeta primitive r-th root
        if (!zeta_.pow(r_).is_one()) throw missing_roots_of_unity("zeta^r != 1");
        for (int d = 1; d < r_; ++d)
            if (zeta_.pow(d).is_one())
                throw missing_roots_of_unity("zeta is not a primitive root of order " +
                                             std::to_string(r_));
        std::vector<Elem> x = basis_vec(1, 0), y = basis_vec(0, 1);
        std::vector<Elem> acc = basis_vec(0, 0);
        for (int i = 0; i < r_; ++i) acc = multiply(acc, x);
        if (acc != scaled_unit(alpha_)) throw error("cyclic algebra: x^r != alpha");
        acc = basis_vec(0, 0);
        for (int i = 0; i < r_; ++i) acc = multiply(acc, y);
        if (acc != scaled_unit(beta_)) throw error("cyclic algebra: y^r != beta");
        std::vector<Elem> yx = multiply(y, x);
        std::vector<Elem> xy = multiply(x, y);
        for (auto& c : xy) c = c * zeta_;
        if (yx != xy) throw error("cyclic algebra: yx != zeta xy");
    }

    void verify_associativity() {
        const int d = dimension();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c) {
                    auto left = multiply(multiply(basis_at(a), basis_at(b)), basis_at(c));
                    auto right = multiply(basis_at(a), multiply(basis_at(b), basis_at(c)));
                    if (left != right) throw error("cyclic algebra: associativity fails on basis");
                }
    }

    std::vector<Elem> basis_vec(int i, int j) const { return basis_at(idx(i, j)); }
    std::vector<Elem> basis_at(int a) const {
        std::vector<Elem> v(dimension(), field_.zero());
        v[a] = field_.one();
        return v;
    }
    std::vector<Elem> scaled_unit(const Elem& c) const {
        std::vector<Elem> v(dimension(), field_.zero());
        v[0] = c;
        return v;
    }

    FieldDesc field_;
    int r_;
    Elem alpha_, beta_, zeta_;
    std::vector<std::vector<std::pair<Elem, int>>> table_;
};

inline CyclicAlgebra cyclic_algebra(const FieldDesc& f, int r, const Elem& alpha,
                                    const Elem& beta) {
    if (alpha.is_zero() || beta.is_zero())
        throw zero_input("cyclic algebra parameters must be nonzero");
    auto roots = mu_r(f, r);
    if (static_cast<int>(roots.size()) != r)
        throw missing_roots_of_unity(f.to_string() + " does not contain all " +
                                     std::to_string(r) + "-th roots of unity");
    // first primitive r-th root in the canonical ordering
    for (const auto& z : roots) {
        bool primitive = true;
        for (int d = 1; d < r; ++d)
            if (z.pow(d).is_one()) { primitive = false; break; }
        if (primitive) return CyclicAlgebra(f, r, alpha, beta, z);
    }
    throw missing_roots_of_unity("no primitive " + std::to_string(r) + "-th root in " +
                                 f.to_string());
}

} // namespace pgl2k
