#include "ordcausal/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ordcausal {

std::string to_string(CovariateRole role) {
    switch (role) {
        case CovariateRole::gps: return "gps";
        case CovariateRole::adjustment_a1: return "adjustment-A1";
        case CovariateRole::audit_only: return "audit-only";
    }
    return "gps";
}

CovariateRole role_from_string(const std::string& s) {
    if (s == "gps") return CovariateRole::gps;
    if (s == "adjustment-A1" || s == "adjustment_a1" || s == "A1") return CovariateRole::adjustment_a1;
    if (s == "audit-only" || s == "audit_only") return CovariateRole::audit_only;
    throw InvalidArgument("unknown covariate role: " + s);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// One CSV record; double quotes delimit fields that contain commas.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

bool is_missing(const std::string& v) {
    if (v.empty() || v == ".") return true;
    std::string lower(v);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return lower == "na" || lower == "nan";
}

double parse_number(const std::string& v, ColumnType type, int row, const std::string& column) {
    std::size_t pos = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw UnparseableValue("row " + std::to_string(row) + ", column '" + column +
                               "': cannot parse '" + v + "'");
    }
    if (pos != v.size())
        throw UnparseableValue("row " + std::to_string(row) + ", column '" + column +
                               "': cannot parse '" + v + "'");
    if (type == ColumnType::binary && parsed != 0.0 && parsed != 1.0)
        throw UnparseableValue("row " + std::to_string(row) + ", column '" + column +
                               "': binary value must be 0 or 1, got '" + v + "'");
    if (type == ColumnType::ordinal && parsed != std::floor(parsed))
        throw UnparseableValue("row " + std::to_string(row) + ", column '" + column +
                               "': ordinal code must be an integer, got '" + v + "'");
    return parsed;
}

}  // namespace

IngestResult ingest_text(const std::string& csv_text, const CsvSchema& schema) {
    if (schema.treatment_levels.size() < 2)
        throw InvalidArgument("ingest: need at least 2 treatment levels");

    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaMismatch("ingest: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv(line);

    std::unordered_map<std::string, int> col_of;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (col_of.count(header[i]) &&
            (header[i] == schema.outcome_column || header[i] == schema.treatment_column ||
             std::any_of(schema.covariates.begin(), schema.covariates.end(),
                         [&](const ColumnSpec& c) { return c.name == header[i]; })))
            throw SchemaMismatch("ingest: duplicate header column '" + header[i] + "'");
        col_of.emplace(header[i], static_cast<int>(i));
    }
    auto require = [&](const std::string& name) {
        auto it = col_of.find(name);
        if (it == col_of.end())
            throw SchemaMismatch("ingest: column '" + name + "' not found in header");
        return it->second;
    };

    std::vector<int> cov_idx;
    for (const auto& spec : schema.covariates) cov_idx.push_back(require(spec.name));
    const int outcome_idx = require(schema.outcome_column);
    const int treatment_idx = require(schema.treatment_column);

    std::unordered_map<std::string, int> level_of;
    for (std::size_t i = 0; i < schema.treatment_levels.size(); ++i)
        level_of.emplace(schema.treatment_levels[i], static_cast<int>(i) + 1);

    IngestResult result;
    Dataset& data = result.data;
    for (const auto& spec : schema.covariates) {
        data.covariate_names.push_back(spec.name);
        data.covariate_types.push_back(spec.type);
    }
    data.n_levels = static_cast<int>(schema.treatment_levels.size());

    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> outcomes;
    int row_index = -1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row_index;
        ++result.rows_read;
        const std::vector<std::string> fields = split_csv(line);
        auto field = [&](int idx) -> const std::string& {
            static const std::string empty;
            return idx < static_cast<int>(fields.size()) ? fields[idx] : empty;
        };

        bool missing = is_missing(field(outcome_idx)) || is_missing(field(treatment_idx));
        for (int idx : cov_idx) missing = missing || is_missing(field(idx));
        if (missing) {
            ++result.rows_dropped;
            continue;
        }

        const std::string& t_label = field(treatment_idx);
        const auto level_it = level_of.find(t_label);
        if (level_it == level_of.end())
            throw UnparseableValue("row " + std::to_string(row_index) +
                                   ": treatment label '" + t_label +
                                   "' outside the declared level ordering");

        Eigen::RowVectorXd xr(static_cast<int>(cov_idx.size()));
        for (std::size_t j = 0; j < cov_idx.size(); ++j)
            xr[static_cast<int>(j)] = parse_number(field(cov_idx[j]), schema.covariates[j].type,
                                                   row_index, schema.covariates[j].name);
        rows.push_back(xr);
        data.ids.push_back(row_index);
        data.t.push_back(level_it->second);
        outcomes.push_back(
            parse_number(field(outcome_idx), ColumnType::numeric, row_index, schema.outcome_column));
    }

    if (rows.empty()) throw EmptyAfterFiltering("ingest: no complete rows");
    data.x.resize(static_cast<int>(rows.size()), static_cast<int>(cov_idx.size()));
    data.y.resize(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.x.row(static_cast<int>(i)) = rows[i];
        data.y[static_cast<int>(i)] = outcomes[i];
    }
    data.validate();
    return result;
}

IngestResult ingest(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaMismatch("ingest: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return ingest_text(buffer.str(), schema);
}

}  // namespace ordcausal
