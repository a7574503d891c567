#include "ordcausal/dataset.hpp"

#include <unordered_set>

namespace ordcausal {

std::string to_string(ColumnType t) {
    switch (t) {
        case ColumnType::numeric: return "numeric";
        case ColumnType::ordinal: return "ordinal";
        case ColumnType::binary: return "binary";
    }
    return "numeric";
}

ColumnType column_type_from_string(const std::string& s) {
    if (s == "numeric") return ColumnType::numeric;
    if (s == "ordinal") return ColumnType::ordinal;
    if (s == "binary") return ColumnType::binary;
    throw InvalidArgument("unknown column type: " + s);
}

void Dataset::validate() const {
    const int nn = n();
    const int pp = p();
    if (covariate_types.size() != covariate_names.size())
        throw InvalidArgument("covariate name/type arity mismatch");
    if (x.rows() != nn || x.cols() != pp)
        throw InvalidArgument("covariate matrix shape does not match ids/names");
    if (static_cast<int>(t.size()) != nn || y.size() != nn)
        throw InvalidArgument("treatment/outcome length does not match ids");
    if (n_levels < 2) throw InvalidArgument("need at least 2 treatment levels");
    for (int i = 0; i < nn; ++i) {
        if (t[i] < 1 || t[i] > n_levels)
            throw InvalidArgument("treatment label outside 1..Z at row " + std::to_string(i));
        if (!x.row(i).allFinite() || !std::isfinite(y[i]))
            throw InvalidArgument("non-finite value at row " + std::to_string(i));
    }
    std::unordered_set<int> seen;
    for (int id : ids)
        if (!seen.insert(id).second)
            throw InvalidArgument("duplicate unit id " + std::to_string(id));
}

std::vector<int> Dataset::level_counts() const {
    std::vector<int> counts(n_levels, 0);
    for (int ti : t) ++counts[ti - 1];
    return counts;
}

int Dataset::column_index(const std::string& name) const {
    for (int j = 0; j < p(); ++j)
        if (covariate_names[j] == name) return j;
    return -1;
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
    Dataset out;
    out.covariate_names = covariate_names;
    out.covariate_types = covariate_types;
    out.n_levels = n_levels;
    const int m = static_cast<int>(rows.size());
    out.ids.reserve(m);
    out.t.reserve(m);
    out.x.resize(m, p());
    out.y.resize(m);
    for (int r = 0; r < m; ++r) {
        const int i = rows[r];
        out.ids.push_back(ids[i]);
        out.t.push_back(t[i]);
        out.x.row(r) = x.row(i);
        out.y[r] = y[i];
    }
    return out;
}

ColumnSelection all_columns(const Dataset& data) {
    ColumnSelection sel(data.p());
    for (int j = 0; j < data.p(); ++j) sel[j] = j;
    return sel;
}

Eigen::MatrixXd select_columns(const Dataset& data, const ColumnSelection& sel) {
    Eigen::MatrixXd out(data.n(), static_cast<int>(sel.size()));
    for (int j = 0; j < static_cast<int>(sel.size()); ++j) {
        const int c = sel[j];
        if (c < 0 || c >= data.p())
            throw InvalidArgument("column index out of range: " + std::to_string(c));
        out.col(j) = data.x.col(c);
    }
    return out;
}

}  // namespace ordcausal
