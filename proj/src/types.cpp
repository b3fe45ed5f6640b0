#include "srcrt/types.hpp"

#include <algorithm>

namespace srcrt {

std::string to_string(Quotient q)
{
    if (q == 0) return "0";
    std::string s;
    while (q > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(q % 10)));
        q /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

ResidueMatrix ResidueMatrix::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty()) return {};
    ResidueMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) throw ValidationError("ragged residue rows");
        for (std::size_t l = 0; l < m.cols_; ++l) m(i, l) = rows[i][l];
    }
    return m;
}

ResidueMatrix ResidueMatrix::from_columns(const std::vector<std::vector<double>>& cols)
{
    if (cols.empty()) return {};
    ResidueMatrix m(cols.front().size(), cols.size());
    for (std::size_t l = 0; l < cols.size(); ++l) {
        if (cols[l].size() != m.rows_) throw ValidationError("ragged residue columns");
        for (std::size_t i = 0; i < m.rows_; ++i) m(i, l) = cols[l][i];
    }
    return m;
}

std::vector<double> ResidueMatrix::column(std::size_t l) const
{
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, l);
    return out;
}

std::vector<double> ResidueMatrix::row(std::size_t i) const
{
    return {values_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

ResidueMatrix ResidueMatrix::select_columns(std::span<const std::size_t> cols) const
{
    ResidueMatrix out(rows_, cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] >= cols_) throw ValidationError("column index out of range");
        for (std::size_t i = 0; i < rows_; ++i) out(i, k) = (*this)(i, cols[k]);
    }
    return out;
}

Clustering Clustering::identity(std::size_t n, std::size_t l)
{
    Clustering c;
    c.perms.assign(l, std::vector<std::size_t>(n));
    for (auto& p : c.perms)
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
    return c;
}

bool Clustering::valid() const
{
    const std::size_t count = n();
    for (const auto& p : perms) {
        if (p.size() != count) return false;
        std::vector<bool> seen(count, false);
        for (std::size_t v : p) {
            if (v >= count || seen[v]) return false;
            seen[v] = true;
        }
    }
    return true;
}

Clustering Clustering::canonical() const
{
    if (perms.empty()) return *this;
    const std::size_t count = n();
    // estimand owning row r of column 0
    std::vector<std::size_t> owner(count);
    for (std::size_t i = 0; i < count; ++i) owner[perms[0][i]] = i;
    Clustering out;
    out.perms.assign(perms.size(), std::vector<std::size_t>(count));
    for (std::size_t l = 0; l < perms.size(); ++l)
        for (std::size_t r = 0; r < count; ++r) out.perms[l][r] = perms[l][owner[r]];
    return out;
}

std::vector<double> Clustering::gather(const ResidueMatrix& m, std::size_t i) const
{
    std::vector<double> out(perms.size());
    for (std::size_t l = 0; l < perms.size(); ++l) out[l] = m(perms[l][i], l);
    return out;
}

}  // namespace srcrt
