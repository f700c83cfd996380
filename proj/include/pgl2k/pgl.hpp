#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pgl2k/fields.hpp"

namespace pgl2k {

// Isomorphism type of a finite subgroup of PGL_2: Z/r, D_r (r>2), (Z/2)^2,
// A4, S4 or A5. Dihedral(2) is canonically the Klein four-group.
class GroupType {
public:
    enum class Tag { cyclic, dihedral, klein4, a4, s4, a5 };

    static GroupType cyclic(int r) {
        if (r < 1) throw bad_field_spec("cyclic order must be >= 1");
        return GroupType(Tag::cyclic, r);
    }
    static GroupType dihedral(int r) {
        if (r < 2) throw bad_field_spec("dihedral parameter must be >= 2");
        if (r == 2) return klein4();
        return GroupType(Tag::dihedral, r);
    }
    static GroupType klein4() { return GroupType(Tag::klein4, 2); }
    static GroupType a4() { return GroupType(Tag::a4, 0); }
    static GroupType s4() { return GroupType(Tag::s4, 0); }
    static GroupType a5() { return GroupType(Tag::a5, 0); }

    static std::optional<GroupType> parse(const std::string& s) {
        if (s == "V4") return klein4();
        if (s == "A4") return a4();
        if (s == "S4") return s4();
        if (s == "A5") return a5();
        if (s.size() >= 2 && (s[0] == 'C' || s[0] == 'D')) {
            try {
                int r = std::stoi(s.substr(1));
                if (s[0] == 'C' && r >= 1) return cyclic(r);
                if (s[0] == 'D' && r >= 2) return dihedral(r);
            } catch (const std::exception&) {
            }
        }
        return std::nullopt;
    }

    Tag tag() const { return tag_; }
    int r() const { return r_; }

    std::size_t order() const {
        switch (tag_) {
        case Tag::cyclic: return static_cast<std::size_t>(r_);
        case Tag::dihedral: return static_cast<std::size_t>(2 * r_);
        case Tag::klein4: return 4;
        case Tag::a4: return 12;
        case Tag::s4: return 24;
        case Tag::a5: return 60;
        }
        return 0;
    }

    std::string name() const {
        switch (tag_) {
        case Tag::cyclic: return "C" + std::to_string(r_);
        case Tag::dihedral: return "D" + std::to_string(r_);
        case Tag::klein4: return "V4";
        case Tag::a4: return "A4";
        case Tag::s4: return "S4";
        case Tag::a5: return "A5";
        }
        return "?";
    }

    bool operator==(const GroupType& o) const { return tag_ == o.tag_ && r_ == o.r_; }
    bool operator!=(const GroupType& o) const { return !(*this == o); }

private:
    GroupType(Tag t, int r) : tag_(t), r_(r) {}
    Tag tag_;
    int r_;
};

// An element of PGL_n(K): an invertible n x n matrix normalized so that the
// first nonzero entry in row-major order is 1. Equal projective classes have
// identical normalized entries, so equality and hashing are cheap.
class ProjMat {
public:
    ProjMat(FieldDesc field, int n, std::vector<Elem> row_major)
        : field_(std::move(field)), n_(n), e_(std::move(row_major)) {
        if (n_ < 2) throw dimension_error("projective matrices need n >= 2");
        if (e_.size() != static_cast<std::size_t>(n_) * n_)
            throw dimension_error("entry count does not match dimension");
        for (const auto& x : e_)
            if (x.field() != field_) throw field_mismatch("matrix entry in wrong field");
        normalize();
        if (det().is_zero()) throw bad_field_spec("matrix is singular");
        key_ = build_key();
    }

    static ProjMat identity(const FieldDesc& f, int n = 2) {
        std::vector<Elem> e(static_cast<std::size_t>(n) * n, f.zero());
        for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i) * n + i] = f.one();
        return ProjMat(f, n, std::move(e));
    }

    static ProjMat mat2(const FieldDesc& f, Elem a, Elem b, Elem c, Elem d) {
        return ProjMat(f, 2, {std::move(a), std::move(b), std::move(c), std::move(d)});
    }

    static ProjMat mat2i(const FieldDesc& f, std::int64_t a, std::int64_t b, std::int64_t c,
                         std::int64_t d) {
        return mat2(f, f.from_integer(a), f.from_integer(b), f.from_integer(c), f.from_integer(d));
    }

    const FieldDesc& field() const { return field_; }
    int dim() const { return n_; }
    const Elem& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<Elem>& entries() const { return e_; }

    ProjMat operator*(const ProjMat& o) const {
        if (field_ != o.field_) throw field_mismatch("composing matrices over different fields");
        if (n_ != o.n_) throw dimension_error("composing matrices of different dimension");
        std::vector<Elem> out(static_cast<std::size_t>(n_) * n_, field_.zero());
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const Elem& aik = at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < n_; ++j)
                    out[static_cast<std::size_t>(i) * n_ + j] =
                        out[static_cast<std::size_t>(i) * n_ + j] + aik * o.at(k, j);
            }
        return ProjMat(field_, n_, std::move(out));
    }

    ProjMat inverse() const {
        if (n_ == 2) {
            return mat2(field_, at(1, 1), -at(0, 1), -at(1, 0), at(0, 0));
        }
        // Gauss-Jordan on [M | I]
        std::vector<Elem> m = e_;
        std::vector<Elem> inv = identity(field_, n_).e_;
        auto M = [&](std::vector<Elem>& v, int i, int j) -> Elem& {
            return v[static_cast<std::size_t>(i) * n_ + j];
        };
        for (int col = 0; col < n_; ++col) {
            int pivot = -1;
            for (int row = col; row < n_; ++row)
                if (!M(m, row, col).is_zero()) { pivot = row; break; }
            if (pivot < 0) throw bad_field_spec("matrix is singular");
            if (pivot != col)
                for (int j = 0; j < n_; ++j) {
                    std::swap(M(m, pivot, j), M(m, col, j));
                    std::swap(M(inv, pivot, j), M(inv, col, j));
                }
            Elem piv_inv = M(m, col, col).inverse();
            for (int j = 0; j < n_; ++j) {
                M(m, col, j) = M(m, col, j) * piv_inv;
                M(inv, col, j) = M(inv, col, j) * piv_inv;
            }
            for (int row = 0; row < n_; ++row) {
                if (row == col) continue;
                Elem factor = M(m, row, col);
                if (factor.is_zero()) continue;
                for (int j = 0; j < n_; ++j) {
                    M(m, row, j) = M(m, row, j) - factor * M(m, col, j);
                    M(inv, row, j) = M(inv, row, j) - factor * M(inv, col, j);
                }
            }
        }
        return ProjMat(field_, n_, std::move(inv));
    }

    Elem det() const {
        if (n_ == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
        std::vector<Elem> m = e_;
        auto M = [&](int i, int j) -> Elem& { return m[static_cast<std::size_t>(i) * n_ + j]; };
        Elem d = field_.one();
        for (int col = 0; col < n_; ++col) {
            int pivot = -1;
            for (int row = col; row < n_; ++row)
                if (!M(row, col).is_zero()) { pivot = row; break; }
            if (pivot < 0) return field_.zero();
            if (pivot != col) {
                for (int j = 0; j < n_; ++j) std::swap(M(pivot, j), M(col, j));
                d = -d;
            }
            d = d * M(col, col);
            Elem piv_inv = M(col, col).inverse();
            for (int row = col + 1; row < n_; ++row) {
                Elem factor = M(row, col) * piv_inv;
                if (factor.is_zero()) continue;
                for (int j = col; j < n_; ++j) M(row, j) = M(row, j) - factor * M(col, j);
            }
        }
        return d;
    }

    bool is_identity() const { return *this == identity(field_, n_); }

    bool operator==(const ProjMat& o) const { return n_ == o.n_ && key_ == o.key_ && field_ == o.field_; }
    bool operator!=(const ProjMat& o) const { return !(*this == o); }
    bool operator<(const ProjMat& o) const { return key_ < o.key_; }

    const std::string& key() const { return key_; }

    std::string to_string() const {
        std::string s = "[";
        for (int i = 0; i < n_; ++i) {
            s += "[";
            for (int j = 0; j < n_; ++j) {
                if (j) s += ",";
                s += at(i, j).to_string();
            }
            s += "]";
            if (i + 1 < n_) s += ",";
        }
        return s + "]";
    }

private:
    void normalize() {
        for (const auto& x : e_) {
            if (!x.is_zero()) {
                if (x.is_one()) return;
                Elem s = x.inverse();
                for (auto& y : e_) y = y * s;
                return;
            }
        }
        throw bad_field_spec("zero matrix is not projective");
    }

    std::string build_key() const {
        std::string s;
        for (const auto& x : e_) {
            s += x.to_string();
            s += ';';
        }
        return s;
    }

    FieldDesc field_;
    int n_;
    std::vector<Elem> e_;
    std::string key_;
};

inline ProjMat compose(const ProjMat& g, const ProjMat& h) { return g * h; }
inline ProjMat inverse(const ProjMat& g) { return g.inverse(); }
inline bool proj_eq(const ProjMat& g, const ProjMat& h) { return g == h; }

// Least n <= cap with g^n projectively trivial.
inline std::optional<int> element_order(const ProjMat& g, int cap) {
    if (cap < 1) throw bad_field_spec("order cap must be >= 1");
    ProjMat id = ProjMat::identity(g.field(), g.dim());
    ProjMat h = g;
    for (int n = 1; n <= cap; ++n) {
        if (h == id) return n;
        h = h * g;
    }
    return std::nullopt;
}

// det-bar: PGL_2(K) -> K*/K*^2 (well defined: rescaling changes det by a square).
inline Elem det_bar(const ProjMat& g) {
    if (g.dim() != 2) throw dimension_error("det_bar is defined on PGL_2 only");
    return square_class(g.det());
}

struct SubgroupRecord {
    std::vector<ProjMat> generators;
    std::vector<ProjMat> elements;  // sorted by key, closed, contains identity
    GroupType iso_type = GroupType::cyclic(1);
    std::vector<Elem> det_image;    // sorted canonical square classes (dim 2 only)

    std::size_t order() const { return elements.size(); }

    std::vector<std::string> signature() const {
        std::vector<std::string> keys;
        keys.reserve(elements.size());
        for (const auto& g : elements) keys.push_back(g.key());
        return keys;
    }

    std::string signature_string() const {
        std::string s;
        for (const auto& g : elements) { s += g.key(); s += '|'; }
        return s;
    }

    bool same_elements(const SubgroupRecord& o) const {
        return signature_string() == o.signature_string();
    }
};

// Recognize the isomorphism type of a closed finite subgroup of PGL_2 from its
// order structure.
inline GroupType iso_type(const std::vector<ProjMat>& elements) {
    const std::size_t n = elements.size();
    if (n == 0) throw unrecognized_type("empty element list");
    const int cap = static_cast<int>(n);
    std::map<int, int> order_count;
    int max_order = 1;
    for (const auto& g : elements) {
        auto o = element_order(g, cap);
        if (!o) throw unrecognized_type("element order exceeds group order");
        order_count[*o]++;
        max_order = std::max(max_order, *o);
    }
    if (static_cast<std::size_t>(max_order) == n) return GroupType::cyclic(static_cast<int>(n));
    if (n == 4 && max_order == 2) return GroupType::klein4();
    if (n == 2 * static_cast<std::size_t>(max_order) && max_order >= 3) {
        // dihedral: a cyclic subgroup of index 2, everything outside it an involution
        auto it = std::find_if(elements.begin(), elements.end(), [&](const ProjMat& g) {
            return element_order(g, cap) == max_order;
        });
        std::set<std::string> cyc;
        ProjMat t = *it;
        ProjMat h = t;
        for (int i = 0; i < max_order; ++i) { cyc.insert(h.key()); h = h * t; }
        bool ok = true;
        for (const auto& g : elements)
            if (!cyc.count(g.key()) && element_order(g, cap) != 2) { ok = false; break; }
        if (ok) return GroupType::dihedral(max_order);
    }
    auto multiset_is = [&](std::initializer_list<std::pair<int, int>> want) {
        std::map<int, int> w;
        for (auto [o, c] : want) w[o] = c;
        return order_count == w;
    };
    if (n == 12 && multiset_is({{1, 1}, {2, 3}, {3, 8}})) return GroupType::a4();
    if (n == 24 && multiset_is({{1, 1}, {2, 9}, {3, 8}, {4, 6}})) return GroupType::s4();
    if (n == 60 && multiset_is({{1, 1}, {2, 15}, {3, 20}, {5, 24}})) return GroupType::a5();
    throw unrecognized_type("order multiset matches no subgroup type of PGL_2");
}

// Breadth-first closure of a generating set; throws if the closure would
// exceed cap (e.g. for an element of infinite order).
inline SubgroupRecord subgroup_closure(const std::vector<ProjMat>& gens, std::size_t cap = 256) {
    if (gens.empty()) throw bad_field_spec("closure needs at least one generator");
    const FieldDesc& f = gens.front().field();
    const int n = gens.front().dim();
    for (const auto& g : gens)
        if (g.field() != f || g.dim() != n)
            throw field_mismatch("generators over mixed fields or dimensions");

    std::map<std::string, ProjMat> seen;
    ProjMat id = ProjMat::identity(f, n);
    seen.emplace(id.key(), id);
    std::vector<ProjMat> frontier = {id};
    while (!frontier.empty()) {
        std::vector<ProjMat> next;
        for (const auto& h : frontier)
            for (const auto& g : gens) {
                ProjMat hg = h * g;
                if (seen.emplace(hg.key(), hg).second) {
                    next.push_back(hg);
                    if (seen.size() > cap)
                        throw closure_exceeds_cap("closure exceeded cap " + std::to_string(cap));
                }
            }
        frontier = std::move(next);
    }

    SubgroupRecord rec;
    rec.generators = gens;
    rec.elements.reserve(seen.size());
    for (auto& [key, g] : seen) rec.elements.push_back(g);
    rec.iso_type = iso_type(rec.elements);
    if (n == 2) {
        std::vector<Elem> classes;
        for (const auto& g : rec.elements) {
            Elem c = det_bar(g);
            if (std::find(classes.begin(), classes.end(), c) == classes.end())
                classes.push_back(c);
        }
        std::sort(classes.begin(), classes.end(), square_class_less);
        rec.det_image = std::move(classes);
    }
    return rec;
}

// All q^3 - q elements of PGL_2(F_q) in a fixed canonical order.
inline std::vector<ProjMat> enumerate_pgl2(const FieldDesc& f, std::int64_t q_cap = 13) {
    if (!f.is_finite()) throw unsupported_field("enumerate_pgl2 needs a finite field");
    const std::int64_t q = f.order();
    if (q > q_cap)
        throw cap_exceeded("q = " + std::to_string(q) + " exceeds cap " + std::to_string(q_cap));
    std::vector<ProjMat> out;
    out.reserve(static_cast<std::size_t>(q * q * q - q));
    // top-left entry 1
    for (std::int64_t b = 0; b < q; ++b)
        for (std::int64_t c = 0; c < q; ++c)
            for (std::int64_t d = 0; d < q; ++d) {
                Elem eb = f.element_at(b), ec = f.element_at(c), ed = f.element_at(d);
                if ((ed - eb * ec).is_zero()) continue;
                out.push_back(ProjMat::mat2(f, f.one(), eb, ec, ed));
            }
    // top-left 0: normalized form [[0,1],[c,d]] with c != 0
    for (std::int64_t c = 1; c < q; ++c)
        for (std::int64_t d = 0; d < q; ++d)
            out.push_back(ProjMat::mat2(f, f.zero(), f.one(), f.element_at(c), f.element_at(d)));
    return out;
}

// Conjugate a subgroup elementwise and re-sort.
inline SubgroupRecord conjugate_subgroup(const ProjMat& g, const SubgroupRecord& h) {
    ProjMat gi = g.inverse();
    SubgroupRecord out;
    out.generators.reserve(h.generators.size());
    for (const auto& x : h.generators) out.generators.push_back(g * x * gi);
    out.elements.reserve(h.elements.size());
    for (const auto& x : h.elements) out.elements.push_back(g * x * gi);
    std::sort(out.elements.begin(), out.elements.end());
    out.iso_type = h.iso_type;
    out.det_image = h.det_image;  // det-bar is conjugation invariant
    return out;
}

// Exhaustive conjugacy test over PGL_2(F_q); returns a conjugating element
// with g H1 g^{-1} = H2 when one exists.
inline std::optional<ProjMat> are_conjugate_subgroups(const SubgroupRecord& h1,
                                                      const SubgroupRecord& h2,
                                                      std::int64_t q_cap = 13) {
    if (h1.elements.empty() || h2.elements.empty())
        throw bad_field_spec("conjugacy test needs nonempty subgroups");
    const FieldDesc& f = h1.elements.front().field();
    if (!f.is_finite()) throw unsupported_field("conjugacy search requires a finite field");
    if (f != h2.elements.front().field())
        throw field_mismatch("subgroups over different fields");
    if (h1.order() != h2.order()) return std::nullopt;
    const std::string target = h2.signature_string();
    if (h1.signature_string() == target) return ProjMat::identity(f, 2);
    for (const auto& g : enumerate_pgl2(f, q_cap)) {
        if (conjugate_subgroup(g, h1).signature_string() == target) return g;
    }
    return std::nullopt;
}

} // namespace pgl2k
