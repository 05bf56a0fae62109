#include "tropfan/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace tropfan {

int rank_of(QMat m) {
    if (m.empty()) return 0;
    const size_t cols = m[0].size();
    size_t row = 0;
    for (size_t col = 0; col < cols && row < m.size(); ++col) {
        size_t pivot = row;
        while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[row], m[pivot]);
        for (size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            Rat factor = m[r][col] / m[row][col];
            for (size_t c2 = col; c2 < cols; ++c2) m[r][c2] -= factor * m[row][c2];
        }
        ++row;
    }
    return static_cast<int>(row);
}

int rank_of_int(const ZMat& m) {
    QMat q;
    for (const auto& r : m) q.push_back(to_rational(r));
    return rank_of(std::move(q));
}

std::optional<QVec> solve_linear(QMat a, QVec b) {
    const size_t rows = a.size();
    const size_t cols = rows == 0 ? 0 : a[0].size();
    if (b.size() != rows) throw std::invalid_argument("solve_linear: shape mismatch");

    std::vector<int> pivot_col;
    size_t row = 0;
    for (size_t col = 0; col < cols && row < rows; ++col) {
        size_t pivot = row;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[row], a[pivot]);
        std::swap(b[row], b[pivot]);
        Rat inv = a[row][col];
        for (size_t c2 = col; c2 < cols; ++c2) a[row][c2] /= inv;
        b[row] /= inv;
        for (size_t r = 0; r < rows; ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rat factor = a[r][col];
            for (size_t c2 = col; c2 < cols; ++c2) a[r][c2] -= factor * a[row][c2];
            b[r] -= factor * b[row];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++row;
    }
    for (size_t r = row; r < rows; ++r)
        if (b[r] != 0) return std::nullopt;

    QVec x(cols, Rat(0));
    for (size_t r = 0; r < pivot_col.size(); ++r) x[pivot_col[r]] = b[r];
    return x;
}

ZVec primitive(const QVec& v) {
    Int lcm = 1;
    for (const auto& q : v) lcm = int_lcm(lcm, q.get_den());
    ZVec out;
    out.reserve(v.size());
    Int gcd = 0;
    for (const auto& q : v) {
        Int val = q.get_num() * (lcm / q.get_den());
        gcd = int_gcd(gcd, val);
        out.push_back(val);
    }
    if (gcd > 1)
        for (auto& x : out) x /= gcd;
    return out;
}

ZVec primitive_int(ZVec v) {
    Int gcd = 0;
    for (const auto& x : v) gcd = int_gcd(gcd, x);
    if (gcd > 1)
        for (auto& x : v) x /= gcd;
    return v;
}

QVec to_rational(const ZVec& v) {
    QVec out;
    out.reserve(v.size());
    for (const auto& x : v) out.emplace_back(x);
    return out;
}

namespace {

// Smith normal form; optionally tracks W = V^{-1} so that the first k rows of
// W span the saturation of the row space.
std::vector<Int> smith_impl(ZMat a, ZMat* w_out) {
    const size_t rows = a.size();
    const size_t cols = rows == 0 ? 0 : a[0].size();
    ZMat w;
    if (w_out) {
        w.assign(cols, ZVec(cols, 0));
        for (size_t i = 0; i < cols; ++i) w[i][i] = 1;
    }

    auto swap_rows = [&](size_t i, size_t j) { std::swap(a[i], a[j]); };
    auto swap_cols = [&](size_t i, size_t j) {
        for (auto& r : a) std::swap(r[i], r[j]);
        if (w_out) std::swap(w[i], w[j]);
    };
    auto add_row = [&](size_t dst, size_t src, const Int& t) {  // row dst += t * row src
        for (size_t c = 0; c < cols; ++c) a[dst][c] += t * a[src][c];
    };
    auto add_col = [&](size_t dst, size_t src, const Int& t) {  // col dst += t * col src
        for (auto& r : a) r[dst] += t * r[src];
        if (w_out)
            for (size_t c = 0; c < cols; ++c) w[src][c] -= t * w[dst][c];
    };
    auto negate_row = [&](size_t i) {
        for (auto& x : a[i]) x = -x;
    };

    std::vector<Int> diag;
    size_t s = 0;
    while (s < rows && s < cols) {
        // Find the minimal nonzero |entry| in the trailing block.
        size_t pi = s, pj = s;
        Int best = 0;
        for (size_t i = s; i < rows; ++i)
            for (size_t j = s; j < cols; ++j) {
                if (a[i][j] == 0) continue;
                Int v = abs(a[i][j]);
                if (best == 0 || v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0) break;
        swap_rows(s, pi);
        swap_cols(s, pj);
        if (a[s][s] < 0) negate_row(s);

        bool dirty = false;
        for (size_t i = s + 1; i < rows; ++i) {
            if (a[i][s] == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), a[i][s].get_mpz_t(), a[s][s].get_mpz_t());
            add_row(i, s, -q);
            if (a[i][s] != 0) dirty = true;
        }
        for (size_t j = s + 1; j < cols; ++j) {
            if (a[s][j] == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), a[s][j].get_mpz_t(), a[s][s].get_mpz_t());
            add_col(j, s, -q);
            if (a[s][j] != 0) dirty = true;
        }
        if (dirty) continue;

        // Divisibility: fold a non-multiple into the pivot's row and retry.
        bool divisible = true;
        for (size_t i = s + 1; i < rows && divisible; ++i)
            for (size_t j = s + 1; j < cols && divisible; ++j)
                if (a[i][j] % a[s][s] != 0) {
                    add_row(s, i, 1);
                    divisible = false;
                }
        if (!divisible) continue;

        diag.push_back(a[s][s]);
        ++s;
    }
    if (w_out) *w_out = std::move(w);
    return diag;
}

}  // namespace

std::vector<Int> smith_diagonal(ZMat a) { return smith_impl(std::move(a), nullptr); }

ZMat saturation_of_rowspan(const ZMat& a) {
    if (a.empty()) return {};
    ZMat w;
    std::vector<Int> diag = smith_impl(a, &w);
    ZMat out(w.begin(), w.begin() + static_cast<long>(diag.size()));
    return out;
}

}  // namespace tropfan
