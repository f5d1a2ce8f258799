#include "covgrid/interval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "covgrid/errors.hpp"

namespace covgrid {

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational parse_rational(const std::string& text) {
    size_t slash = text.find('/');
    try {
        Rational r;
        size_t used = 0;
        if (slash == std::string::npos) {
            r.num = std::stoll(text, &used);
            if (used != text.size())
                throw InputError(ErrorKind::MalformedInput, "bad rational: " + text);
            r.den = 1;
        } else {
            std::string head = text.substr(0, slash), tail = text.substr(slash + 1);
            r.num = std::stoll(head, &used);
            if (used != head.size())
                throw InputError(ErrorKind::MalformedInput, "bad rational: " + text);
            r.den = std::stoll(tail, &used);
            if (used != tail.size())
                throw InputError(ErrorKind::MalformedInput, "bad rational: " + text);
        }
        if (r.den == 0)
            throw InputError(ErrorKind::MalformedInput, "zero denominator");
        if (r.den < 0) {
            r.den = -r.den;
            r.num = -r.num;
        }
        if (std::abs(r.num) > (1ll << 31) || r.den > (1ll << 31))
            throw InputError(ErrorKind::MalformedInput, "rational out of range");
        int64_t g = std::gcd(std::abs(r.num), r.den);
        if (g > 1) {
            r.num /= g;
            r.den /= g;
        }
        return r;
    } catch (const std::invalid_argument&) {
        throw InputError(ErrorKind::MalformedInput, "bad rational: " + text);
    } catch (const std::out_of_range&) {
        throw InputError(ErrorKind::MalformedInput, "rational out of range: " + text);
    }
}

std::optional<int> excess(int n, const Rational& r) {
    if (n < 1) throw InputError(ErrorKind::BadArgument, "n must be >= 1");
    if (!r.positive())
        throw InputError(ErrorKind::NonpositiveRadius, "radius must be positive");
    // ceil(1/(2r)) = ceil(den / (2 num))
    int64_t p = r.num, q = r.den;
    int64_t need = (q + 2 * p - 1) / (2 * p);
    int64_t k = n - need;
    if (k < 0) return std::nullopt;
    return static_cast<int>(k);
}

CellComplex skeleton_complex(const FaceLattice& fl) {
    if (fl.k > 3)
        throw InputError(ErrorKind::BadArgument,
                         "graded store holds dimensions 0..3 only");
    CellComplex c;
    auto key_of = [m = fl.m](const FaceLattice::Osp& osp) {
        Key128 k;
        k.hi = static_cast<uint64_t>(CellClass::OspFace) << 56 |
               static_cast<uint64_t>(osp.size()) << 48;
        for (size_t b = 0; b < osp.size(); ++b)
            for (uint8_t label : osp[b]) k.lo |= slot_nibble(label, b);
        (void)m;
        return k;
    };
    std::vector<uint32_t> bnd;
    for (int d = 0; d <= fl.k; ++d) {
        for (const FaceLattice::Osp& osp : fl.faces[d]) {
            bnd.clear();
            // boundary faces split one block into an ordered pair
            for (size_t j = 0; j < osp.size() && d > 0; ++j) {
                const std::vector<uint8_t>& block = osp[j];
                uint32_t full = (1u << block.size()) - 1;
                for (uint32_t sub = 1; sub < full; ++sub) {
                    FaceLattice::Osp child;
                    for (size_t i = 0; i < j; ++i) child.push_back(osp[i]);
                    std::vector<uint8_t> s1, s2;
                    for (size_t t = 0; t < block.size(); ++t)
                        (sub >> t & 1 ? s1 : s2).push_back(block[t]);
                    child.push_back(std::move(s1));
                    child.push_back(std::move(s2));
                    for (size_t i = j + 1; i < osp.size(); ++i) child.push_back(osp[i]);
                    auto id = c.find(key_of(child));
                    if (!id) throw std::logic_error("missing boundary face");
                    bnd.push_back(*id);
                }
            }
            std::sort(bnd.begin(), bnd.end());
            bnd.erase(std::unique(bnd.begin(), bnd.end()), bnd.end());
            c.add_cell(d, bnd, key_of(osp), CellClass::OspFace);
        }
    }
    return c;
}

IntervalModel interval_model(int n, const Rational& r) {
    IntervalModel m;
    m.n = n;
    m.r = r;
    std::optional<int> k = excess(n, r);
    if (!k) {
        m.empty = true;
        return m;
    }
    m.empty = false;
    m.k = *k;
    FaceLattice fl = k_skeleton(n, m.k);
    for (int d = 0; d <= m.k; ++d) m.counts.push_back(fl.face_count(d));
    m.euler = fl.euler();
    if (m.k <= 3) {
        CellComplex c = skeleton_complex(fl);
        if (c.euler_characteristic() != m.euler)
            throw std::logic_error("skeleton chi mismatch");
        m.betti = c.betti(3);
        m.complex.emplace(std::move(c));
    }
    return m;
}

} // namespace covgrid
