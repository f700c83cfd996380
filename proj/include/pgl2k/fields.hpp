#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pgl2k/errors.hpp"

namespace pgl2k {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class FieldKind { rationals, prime, extension };

namespace detail {

inline std::int64_t mod_reduce(std::int64_t v, std::int64_t p) {
    v %= p;
    return v < 0 ? v + p : v;
}

inline std::int64_t mod_mul(std::int64_t a, std::int64_t b, std::int64_t p) {
    return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % p);
}

inline std::int64_t mod_pow(std::int64_t a, std::int64_t e, std::int64_t p) {
    std::int64_t acc = 1 % p;
    a = mod_reduce(a, p);
    while (e > 0) {
        if (e & 1) acc = mod_mul(acc, a, p);
        a = mod_mul(a, a, p);
        e >>= 1;
    }
    return acc;
}

inline std::int64_t mod_inv(std::int64_t a, std::int64_t p) {
    a = mod_reduce(a, p);
    if (a == 0) throw division_by_zero("inverse of zero residue mod " + std::to_string(p));
    std::int64_t t = 0, new_t = 1, r = p, new_r = a;
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t; new_t = tmp;
        tmp = r - q * new_r;
        r = new_r; new_r = tmp;
    }
    return mod_reduce(t, p);
}

inline bool is_prime_i64(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// ---- dense polynomials over F_p, coefficients low-to-high -----------------

using Poly = std::vector<std::int64_t>;

inline void poly_trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::int64_t p) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] = mod_reduce(out[i + j] + mod_mul(a[i], b[j], p), p);
    poly_trim(out);
    return out;
}

// Remainder of f by monic divisor g.
inline Poly poly_rem(Poly f, const Poly& g, std::int64_t p) {
    poly_trim(f);
    const std::size_t dg = g.size() - 1;
    while (f.size() > dg) {
        std::int64_t lead = f.back();
        std::size_t shift = f.size() - 1 - dg;
        if (lead != 0)
            for (std::size_t i = 0; i <= dg; ++i)
                f[shift + i] = mod_reduce(f[shift + i] - mod_mul(lead, g[i], p), p);
        f.pop_back();
        poly_trim(f);
    }
    return f;
}

// Extended Euclid: returns (g, u) with u*a = g mod m, g = gcd(a, m), g monic.
inline std::pair<Poly, Poly> poly_ext_gcd_mod(const Poly& a, const Poly& m, std::int64_t p) {
    Poly r0 = m, r1 = a, u0 = {}, u1 = {1};
    poly_trim(r1);
    while (!r1.empty()) {
        // divide r0 by r1
        Poly q;
        Poly rem = r0;
        poly_trim(rem);
        std::int64_t lead_inv = mod_inv(r1.back(), p);
        if (rem.size() >= r1.size()) q.assign(rem.size() - r1.size() + 1, 0);
        while (rem.size() >= r1.size() && !rem.empty()) {
            std::int64_t c = mod_mul(rem.back(), lead_inv, p);
            std::size_t shift = rem.size() - r1.size();
            q[shift] = c;
            for (std::size_t i = 0; i < r1.size(); ++i)
                rem[shift + i] = mod_reduce(rem[shift + i] - mod_mul(c, r1[i], p), p);
            poly_trim(rem);
        }
        // u2 = u0 - q*u1
        Poly qu1 = poly_mul(q, u1, p);
        Poly u2 = u0;
        if (u2.size() < qu1.size()) u2.resize(qu1.size(), 0);
        for (std::size_t i = 0; i < qu1.size(); ++i)
            u2[i] = mod_reduce(u2[i] - qu1[i], p);
        poly_trim(u2);
        r0 = r1; r1 = rem;
        u0 = u1; u1 = u2;
    }
    // normalize gcd monic
    if (!r0.empty()) {
        std::int64_t inv = mod_inv(r0.back(), p);
        for (auto& c : r0) c = mod_mul(c, inv, p);
        for (auto& c : u0) c = mod_mul(c, inv, p);
    }
    return {r0, u0};
}

inline bool poly_is_irreducible(const Poly& f, std::int64_t p) {
    const std::size_t k = f.size() - 1;
    if (k == 0) return false;
    if (k == 1) return true;
    // trial division by every monic polynomial of degree 1..k/2
    for (std::size_t d = 1; 2 * d <= k; ++d) {
        std::int64_t count = 1;
        for (std::size_t i = 0; i < d; ++i) count *= p;
        for (std::int64_t idx = 0; idx < count; ++idx) {
            Poly g(d + 1, 0);
            std::int64_t v = idx;
            for (std::size_t i = 0; i < d; ++i) { g[i] = v % p; v /= p; }
            g[d] = 1;
            Poly r = poly_rem(f, g, p);
            if (r.empty()) return false;
        }
    }
    return true;
}

// Smallest monic irreducible of degree k over F_p in the canonical encoding
// (non-leading coefficients read as base-p digits, c0 least significant).
inline Poly canonical_irreducible(std::int64_t p, int k) {
    std::int64_t count = 1;
    for (int i = 0; i < k; ++i) count *= p;
    for (std::int64_t idx = 0; idx < count; ++idx) {
        Poly f(static_cast<std::size_t>(k) + 1, 0);
        std::int64_t v = idx;
        for (int i = 0; i < k; ++i) { f[i] = v % p; v /= p; }
        f[k] = 1;
        if (poly_is_irreducible(f, p)) return f;
    }
    throw bad_field_spec("no irreducible polynomial found (unreachable)");
}

inline std::vector<std::pair<Int, int>> factorize(Int n) {
    if (n < 0) n = -n;
    std::vector<std::pair<Int, int>> out;
    for (Int d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            int e = 0;
            while (n % d == 0) { n /= d; ++e; }
            out.emplace_back(d, e);
        }
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

// sign * squarefree part of a nonzero integer
inline Int squarefree_part(const Int& n) {
    Int out = n < 0 ? Int(-1) : Int(1);
    for (const auto& [prime, exp] : factorize(n))
        if (exp % 2 == 1) out *= prime;
    return out;
}

} // namespace detail

class Elem;

// A concrete base field: Q, F_p, or F_{p^k} with an explicit modulus.
class FieldDesc {
public:
    static FieldDesc rationals() { return FieldDesc(); }

    static FieldDesc prime_field(std::int64_t p) {
        if (!detail::is_prime_i64(p))
            throw bad_field_spec("characteristic must be prime, got " + std::to_string(p));
        FieldDesc f;
        f.kind_ = FieldKind::prime;
        f.p_ = p;
        f.k_ = 1;
        return f;
    }

    static FieldDesc extension_field(std::int64_t p, int k) {
        if (!detail::is_prime_i64(p))
            throw bad_field_spec("characteristic must be prime, got " + std::to_string(p));
        if (k < 2) throw bad_field_spec("extension degree must be >= 2");
        return extension_field(p, k, detail::canonical_irreducible(p, k));
    }

    static FieldDesc extension_field(std::int64_t p, int k, std::vector<std::int64_t> modulus) {
        if (!detail::is_prime_i64(p))
            throw bad_field_spec("characteristic must be prime, got " + std::to_string(p));
        if (k < 2) throw bad_field_spec("extension degree must be >= 2");
        for (auto& c : modulus) c = detail::mod_reduce(c, p);
        detail::poly_trim(modulus);
        if (modulus.size() != static_cast<std::size_t>(k) + 1 || modulus.back() != 1)
            throw bad_field_spec("modulus must be monic of degree " + std::to_string(k));
        if (!detail::poly_is_irreducible(modulus, p))
            throw bad_field_spec("modulus is reducible over F_" + std::to_string(p));
        FieldDesc f;
        f.kind_ = FieldKind::extension;
        f.p_ = p;
        f.k_ = k;
        f.modulus_ = std::make_shared<const std::vector<std::int64_t>>(std::move(modulus));
        return f;
    }

    // q = p^k -> the canonical field of that order
    static FieldDesc of_order(std::int64_t q) {
        if (q < 2) throw bad_field_spec("field order must be >= 2");
        for (std::int64_t p = 2; p * p <= q; ++p) {
            if (q % p == 0) {
                std::int64_t m = q;
                int k = 0;
                while (m % p == 0) { m /= p; ++k; }
                if (m != 1) throw bad_field_spec(std::to_string(q) + " is not a prime power");
                return k == 1 ? prime_field(p) : extension_field(p, k);
            }
        }
        return prime_field(q);
    }

    static FieldDesc parse(const std::string& text);

    FieldKind kind() const noexcept { return kind_; }
    bool is_rationals() const noexcept { return kind_ == FieldKind::rationals; }
    bool is_finite() const noexcept { return kind_ != FieldKind::rationals; }
    std::int64_t characteristic() const noexcept { return is_finite() ? p_ : 0; }
    std::int64_t prime() const { require_finite(); return p_; }
    int degree() const { require_finite(); return k_; }

    std::int64_t order() const {
        require_finite();
        std::int64_t q = 1;
        for (int i = 0; i < k_; ++i) q *= p_;
        return q;
    }

    const std::vector<std::int64_t>& modulus() const {
        if (kind_ != FieldKind::extension)
            throw bad_field_spec("modulus only defined for extension fields");
        return *modulus_;
    }

    std::string to_string() const {
        switch (kind_) {
        case FieldKind::rationals: return "Q";
        case FieldKind::prime: return "F" + std::to_string(p_);
        case FieldKind::extension: {
            std::string s = "F" + std::to_string(p_) + "^" + std::to_string(k_);
            if (*modulus_ != detail::canonical_irreducible(p_, k_)) {
                s += ":poly=";
                for (std::size_t i = 0; i < modulus_->size(); ++i) {
                    if (i) s += ",";
                    s += std::to_string((*modulus_)[i]);
                }
            }
            return s;
        }
        }
        return "?";
    }

    bool operator==(const FieldDesc& o) const {
        if (kind_ != o.kind_) return false;
        if (kind_ == FieldKind::rationals) return true;
        if (p_ != o.p_ || k_ != o.k_) return false;
        if (kind_ == FieldKind::extension) return *modulus_ == *o.modulus_;
        return true;
    }
    bool operator!=(const FieldDesc& o) const { return !(*this == o); }

    // --- element factories (definitions after Elem) ---
    Elem zero() const;
    Elem one() const;
    Elem from_integer(std::int64_t v) const;
    Elem from_integer(const Int& v) const;
    Elem from_rational(const Rational& r) const;
    Elem from_coeffs(std::vector<std::int64_t> coeffs) const;
    Elem element_at(std::int64_t index) const;  // canonical enumeration of a finite field
    Elem parse_elem(const std::string& text) const;

private:
    void require_finite() const {
        if (!is_finite()) throw bad_field_spec("operation requires a finite field");
    }

    FieldKind kind_ = FieldKind::rationals;
    std::int64_t p_ = 0;
    int k_ = 1;
    std::shared_ptr<const std::vector<std::int64_t>> modulus_;
};

// An exact element of a FieldDesc. Immutable value type.
class Elem {
public:
    Elem(FieldDesc field, Rational v) : field_(std::move(field)), v_(std::move(v)) {
        if (!field_.is_rationals()) throw field_mismatch("rational payload in finite field");
    }
    Elem(FieldDesc field, std::int64_t residue) : field_(std::move(field)), v_(residue) {
        if (field_.kind() != FieldKind::prime) throw field_mismatch("residue payload needs a prime field");
    }
    Elem(FieldDesc field, std::vector<std::int64_t> coeffs)
        : field_(std::move(field)), v_(std::move(coeffs)) {
        if (field_.kind() != FieldKind::extension)
            throw field_mismatch("coefficient payload needs an extension field");
    }

    const FieldDesc& field() const noexcept { return field_; }

    bool is_zero() const {
        switch (field_.kind()) {
        case FieldKind::rationals: return rational_value() == 0;
        case FieldKind::prime: return residue() == 0;
        case FieldKind::extension: {
            for (auto c : coeffs()) if (c != 0) return false;
            return true;
        }
        }
        return false;
    }

    bool is_one() const { return *this == field_.one(); }

    const Rational& rational_value() const { return std::get<Rational>(v_); }
    std::int64_t residue() const { return std::get<std::int64_t>(v_); }
    const std::vector<std::int64_t>& coeffs() const { return std::get<std::vector<std::int64_t>>(v_); }

    // finite fields: uniform coefficient view (prime fields give one digit)
    std::vector<std::int64_t> coeff_vector() const {
        if (field_.kind() == FieldKind::prime) return {residue()};
        return coeffs();
    }

    std::int64_t canonical_index() const {
        switch (field_.kind()) {
        case FieldKind::prime: return residue();
        case FieldKind::extension: {
            std::int64_t idx = 0, w = 1;
            for (auto c : coeffs()) { idx += c * w; w *= field_.prime(); }
            return idx;
        }
        default:
            throw bad_field_spec("canonical_index requires a finite field");
        }
    }

    Elem operator+(const Elem& o) const {
        check_same(o);
        switch (field_.kind()) {
        case FieldKind::rationals: return Elem(field_, rational_value() + o.rational_value());
        case FieldKind::prime:
            return Elem(field_, detail::mod_reduce(residue() + o.residue(), field_.prime()));
        case FieldKind::extension: {
            auto c = coeffs();
            for (std::size_t i = 0; i < c.size(); ++i)
                c[i] = detail::mod_reduce(c[i] + o.coeffs()[i], field_.prime());
            return Elem(field_, std::move(c));
        }
        }
        throw error("unreachable");
    }

    Elem operator-() const {
        switch (field_.kind()) {
        case FieldKind::rationals: return Elem(field_, -rational_value());
        case FieldKind::prime:
            return Elem(field_, detail::mod_reduce(-residue(), field_.prime()));
        case FieldKind::extension: {
            auto c = coeffs();
            for (auto& x : c) x = detail::mod_reduce(-x, field_.prime());
            return Elem(field_, std::move(c));
        }
        }
        throw error("unreachable");
    }

    Elem operator-(const Elem& o) const { return *this + (-o); }

    Elem operator*(const Elem& o) const {
        check_same(o);
        switch (field_.kind()) {
        case FieldKind::rationals: return Elem(field_, rational_value() * o.rational_value());
        case FieldKind::prime:
            return Elem(field_, detail::mod_mul(residue(), o.residue(), field_.prime()));
        case FieldKind::extension: {
            auto prod = detail::poly_mul(coeffs(), o.coeffs(), field_.prime());
            prod = detail::poly_rem(prod, field_.modulus(), field_.prime());
            prod.resize(field_.degree(), 0);
            return Elem(field_, std::move(prod));
        }
        }
        throw error("unreachable");
    }

    Elem inverse() const {
        if (is_zero()) throw division_by_zero("inverse of zero in " + field_.to_string());
        switch (field_.kind()) {
        case FieldKind::rationals: return Elem(field_, Rational(1) / rational_value());
        case FieldKind::prime: return Elem(field_, detail::mod_inv(residue(), field_.prime()));
        case FieldKind::extension: {
            auto [g, u] = detail::poly_ext_gcd_mod(coeffs(), field_.modulus(), field_.prime());
            if (g.size() != 1)
                throw division_by_zero("element not invertible (reducible modulus?)");
            u = detail::poly_rem(u, field_.modulus(), field_.prime());
            u.resize(field_.degree(), 0);
            return Elem(field_, std::move(u));
        }
        }
        throw error("unreachable");
    }

    Elem operator/(const Elem& o) const {
        check_same(o);
        if (o.is_zero()) throw division_by_zero("division by zero in " + field_.to_string());
        return *this * o.inverse();
    }

    Elem pow(std::int64_t e) const {
        if (e < 0) return inverse().pow(-e);
        Elem acc = field_.one();
        Elem base = *this;
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    bool operator==(const Elem& o) const {
        if (field_ != o.field_) return false;
        return v_ == o.v_;
    }
    bool operator!=(const Elem& o) const { return !(*this == o); }

    std::string to_string() const {
        switch (field_.kind()) {
        case FieldKind::rationals: {
            const Rational& r = rational_value();
            Int n = numerator(r), d = denominator(r);
            if (d == 1) return n.str();
            return n.str() + "/" + d.str();
        }
        case FieldKind::prime: return std::to_string(residue());
        case FieldKind::extension: {
            std::string s;
            for (std::size_t i = 0; i < coeffs().size(); ++i) {
                if (i) s += ",";
                s += std::to_string(coeffs()[i]);
            }
            return s;
        }
        }
        return "?";
    }

private:
    void check_same(const Elem& o) const {
        if (field_ != o.field_)
            throw field_mismatch("elements of " + field_.to_string() + " and " + o.field_.to_string());
    }

    FieldDesc field_;
    std::variant<Rational, std::int64_t, std::vector<std::int64_t>> v_;
};

// ---- FieldDesc element factories -------------------------------------------

inline Elem FieldDesc::zero() const {
    switch (kind_) {
    case FieldKind::rationals: return Elem(*this, Rational(0));
    case FieldKind::prime: return Elem(*this, std::int64_t{0});
    case FieldKind::extension: return Elem(*this, std::vector<std::int64_t>(k_, 0));
    }
    throw error("unreachable");
}

inline Elem FieldDesc::one() const { return from_integer(1); }

inline Elem FieldDesc::from_integer(std::int64_t v) const {
    switch (kind_) {
    case FieldKind::rationals: return Elem(*this, Rational(v));
    case FieldKind::prime: return Elem(*this, detail::mod_reduce(v, p_));
    case FieldKind::extension: {
        std::vector<std::int64_t> c(k_, 0);
        c[0] = detail::mod_reduce(v, p_);
        return Elem(*this, std::move(c));
    }
    }
    throw error("unreachable");
}

inline Elem FieldDesc::from_integer(const Int& v) const {
    if (kind_ == FieldKind::rationals) return Elem(*this, Rational(v));
    Int r = v % p_;
    return from_integer(r.convert_to<std::int64_t>());
}

inline Elem FieldDesc::from_rational(const Rational& r) const {
    if (kind_ == FieldKind::rationals) return Elem(*this, r);
    Elem num = from_integer(Int(numerator(r)));
    Elem den = from_integer(Int(denominator(r)));
    return num / den;
}

inline Elem FieldDesc::from_coeffs(std::vector<std::int64_t> coeffs) const {
    if (kind_ == FieldKind::prime) {
        if (coeffs.size() != 1) throw bad_field_spec("prime field takes a single coefficient");
        return Elem(*this, detail::mod_reduce(coeffs[0], p_));
    }
    if (kind_ != FieldKind::extension)
        throw bad_field_spec("coefficient vectors require a finite field");
    if (coeffs.size() > static_cast<std::size_t>(k_))
        throw bad_field_spec("coefficient vector longer than extension degree");
    coeffs.resize(k_, 0);
    for (auto& c : coeffs) c = detail::mod_reduce(c, p_);
    return Elem(*this, std::move(coeffs));
}

inline Elem FieldDesc::element_at(std::int64_t index) const {
    require_finite();
    if (index < 0 || index >= order())
        throw bad_field_spec("element index out of range");
    if (kind_ == FieldKind::prime) return Elem(*this, index);
    std::vector<std::int64_t> c(k_, 0);
    for (int i = 0; i < k_; ++i) { c[i] = index % p_; index /= p_; }
    return Elem(*this, std::move(c));
}

inline Elem FieldDesc::parse_elem(const std::string& text) const {
    if (text.empty()) throw bad_field_spec("empty element literal");
    if (kind_ == FieldKind::rationals) {
        auto slash = text.find('/');
        try {
            if (slash == std::string::npos) return Elem(*this, Rational(Int(text)));
            Int n(text.substr(0, slash)), d(text.substr(slash + 1));
            if (d == 0) throw division_by_zero("zero denominator in literal");
            return Elem(*this, Rational(n, d));
        } catch (const std::exception& e) {
            throw bad_field_spec("bad rational literal '" + text + "': " + e.what());
        }
    }
    std::vector<std::int64_t> coeffs;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            coeffs.push_back(std::stoll(part));
        } catch (const std::exception&) {
            throw bad_field_spec("bad finite-field literal '" + text + "'");
        }
    }
    if (kind_ == FieldKind::prime) {
        if (coeffs.size() != 1) throw bad_field_spec("prime-field literal must be one integer");
        return from_integer(coeffs[0]);
    }
    return from_coeffs(std::move(coeffs));
}

inline FieldDesc FieldDesc::parse(const std::string& text) {
    if (text == "Q") return rationals();
    if (text.size() < 2 || text[0] != 'F')
        throw bad_field_spec("bad field descriptor '" + text + "'");
    std::string body = text.substr(1);
    std::string poly_part;
    auto colon = body.find(':');
    if (colon != std::string::npos) {
        poly_part = body.substr(colon + 1);
        body = body.substr(0, colon);
    }
    std::int64_t p = 0;
    int k = 1;
    auto caret = body.find('^');
    try {
        if (caret == std::string::npos) {
            p = std::stoll(body);
        } else {
            p = std::stoll(body.substr(0, caret));
            k = std::stoi(body.substr(caret + 1));
        }
    } catch (const std::exception&) {
        throw bad_field_spec("bad field descriptor '" + text + "'");
    }
    if (!poly_part.empty()) {
        if (poly_part.rfind("poly=", 0) != 0)
            throw bad_field_spec("bad field descriptor '" + text + "'");
        std::vector<std::int64_t> poly;
        std::stringstream ss(poly_part.substr(5));
        std::string part;
        while (std::getline(ss, part, ','))
            poly.push_back(std::stoll(part));
        if (k < 2) throw bad_field_spec("explicit modulus requires degree >= 2");
        return extension_field(p, k, std::move(poly));
    }
    return k == 1 ? prime_field(p) : extension_field(p, k);
}

// ---- field-level predicates -------------------------------------------------

// Least nonzero nonsquare in the canonical ordering of a finite field of odd order.
inline Elem least_nonsquare(const FieldDesc& f) {
    if (!f.is_finite() || f.characteristic() == 2)
        throw bad_field_spec("least_nonsquare requires odd finite field");
    const std::int64_t q = f.order();
    std::vector<bool> is_sq(q, false);
    for (std::int64_t i = 0; i < q; ++i) {
        Elem y = f.element_at(i);
        is_sq[(y * y).canonical_index()] = true;
    }
    for (std::int64_t i = 1; i < q; ++i)
        if (!is_sq[i]) return f.element_at(i);
    throw error("no nonsquare found (unreachable for odd q)");
}

// A square root of x when one exists in the field; canonical choice.
inline std::optional<Elem> is_square(const Elem& x) {
    if (x.is_zero()) throw zero_input("is_square requires nonzero input");
    const FieldDesc& f = x.field();
    if (f.is_rationals()) {
        const Rational& r = x.rational_value();
        if (r < 0) return std::nullopt;
        Int n = numerator(r), d = denominator(r);
        Int sn = sqrt(n), sd = sqrt(d);
        if (sn * sn == n && sd * sd == d)
            return Elem(f, Rational(sn, sd));
        return std::nullopt;
    }
    if (f.characteristic() == 2) {
        // Frobenius is bijective: the root is x^(q/2)
        Elem y = x.pow(f.order() / 2);
        return y * y == x ? std::optional<Elem>(y) : std::nullopt;
    }
    const std::int64_t q = f.order();
    for (std::int64_t i = 0; i < q; ++i) {
        Elem y = f.element_at(i);
        if (y * y == x) return y;
    }
    return std::nullopt;
}

// Canonical representative of x mod squares: signed squarefree integer over Q,
// 1 or the least nonsquare over F_q.
inline Elem square_class(const Elem& x) {
    if (x.is_zero()) throw zero_input("square_class requires nonzero input");
    const FieldDesc& f = x.field();
    if (f.is_rationals()) {
        const Rational& r = x.rational_value();
        Int prod = numerator(r) * denominator(r);
        return Elem(f, Rational(detail::squarefree_part(prod)));
    }
    if (f.characteristic() == 2) return f.one();
    return is_square(x) ? f.one() : least_nonsquare(f);
}

struct SquareClasses {
    std::vector<Elem> reps;
    bool truncated = false;
};

// K*/K*^2: exact for finite fields, truncated at |.| <= bound for Q.
inline SquareClasses square_class_group(const FieldDesc& f, std::int64_t bound = 10) {
    SquareClasses out;
    if (f.is_rationals()) {
        out.truncated = true;
        for (std::int64_t m = 1; m <= bound; ++m) {
            if (detail::squarefree_part(Int(m)) != m) continue;
            out.reps.push_back(f.from_integer(m));
            out.reps.push_back(f.from_integer(-m));
        }
        return out;
    }
    out.reps.push_back(f.one());
    if (f.characteristic() != 2) out.reps.push_back(least_nonsquare(f));
    return out;
}

// All r-th roots of unity contained in the field.
inline std::vector<Elem> mu_r(const FieldDesc& f, int r) {
    if (r < 1) throw bad_field_spec("mu_r requires r >= 1");
    std::vector<Elem> out;
    if (f.is_rationals()) {
        out.push_back(f.one());
        if (r % 2 == 0) out.push_back(f.from_integer(-1));
        return out;
    }
    const std::int64_t q = f.order();
    for (std::int64_t i = 0; i < q; ++i) {
        Elem x = f.element_at(i);
        if (!x.is_zero() && x.pow(r).is_one()) out.push_back(x);
    }
    return out;
}

namespace detail {

// order of the 2x2 matrix [[a,b],[c,d]] in GL_2, up to cap; 0 if not reached
inline int raw_mat2_order(const std::array<Elem, 4>& m, int cap) {
    const FieldDesc& f = m[0].field();
    std::array<Elem, 4> id = {f.one(), f.zero(), f.zero(), f.one()};
    std::array<Elem, 4> h = m;
    for (int i = 1; i <= cap; ++i) {
        if (h == id) return i;
        std::array<Elem, 4> nh = {
            h[0] * m[0] + h[1] * m[2], h[0] * m[1] + h[1] * m[3],
            h[2] * m[0] + h[3] * m[2], h[2] * m[1] + h[3] * m[3]};
        h = nh;
    }
    return 0;
}

} // namespace detail

// lambda = zeta + zeta^{-1} for a primitive r-th root of unity zeta lying in a
// quadratic-or-smaller extension, when lambda is in the field.
inline std::optional<Elem> zeta_plus_inverse(const FieldDesc& f, int r) {
    if (r < 1) throw bad_field_spec("zeta_plus_inverse requires r >= 1");
    if (f.is_finite() && r % f.characteristic() == 0)
        throw characteristic_divides_order("r = " + std::to_string(r) + " in characteristic " +
                                           std::to_string(f.characteristic()));
    if (f.is_rationals()) {
        switch (r) {
        case 1: return f.from_integer(2);
        case 2: return f.from_integer(-2);
        case 3: return f.from_integer(-1);
        case 4: return f.from_integer(0);
        case 6: return f.from_integer(1);
        default: return std::nullopt;
        }
    }
    if (r == 1) return f.from_integer(2);
    if (r == 2) return f.from_integer(-2);
    // lambda works iff [[lambda,-1],[1,0]] has exact order r in GL_2 (its
    // eigenvalues are zeta, zeta^{-1} with product 1)
    const std::int64_t q = f.order();
    for (std::int64_t i = 0; i < q; ++i) {
        Elem lam = f.element_at(i);
        std::array<Elem, 4> m = {lam, f.from_integer(-1), f.one(), f.zero()};
        if (detail::raw_mat2_order(m, r) == r) return lam;
    }
    return std::nullopt;
}

// Witness (a, b) with a^2 + b^2 = -1, when one exists.
inline std::optional<std::pair<Elem, Elem>> minus_one_two_squares(const FieldDesc& f) {
    if (f.is_rationals()) return std::nullopt;
    if (f.characteristic() == 2) return std::make_pair(f.one(), f.zero());
    const std::int64_t q = f.order();
    const Elem minus_one = f.from_integer(-1);
    for (std::int64_t i = 0; i < q; ++i) {
        Elem a = f.element_at(i);
        Elem a2 = a * a;
        for (std::int64_t j = 0; j < q; ++j) {
            Elem b = f.element_at(j);
            if (a2 + b * b == minus_one) return std::make_pair(a, b);
        }
    }
    return std::nullopt;  // unreachable for finite fields
}

// Deterministic ordering for canonical square-class representatives.
inline bool square_class_less(const Elem& a, const Elem& b) {
    if (a.field().is_finite()) return a.canonical_index() < b.canonical_index();
    const Rational &x = a.rational_value(), &y = b.rational_value();
    Int ax = abs(numerator(x)), ay = abs(numerator(y));
    if (ax != ay) return ax < ay;
    return x > y;  // positive before negative
}

} // namespace pgl2k
