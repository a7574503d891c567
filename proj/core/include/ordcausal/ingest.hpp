#pragma once

#include <string>
#include <vector>

#include "ordcausal/dataset.hpp"

namespace ordcausal {

enum class CovariateRole { gps, adjustment_a1, audit_only };

std::string to_string(CovariateRole role);
CovariateRole role_from_string(const std::string& s);

struct ColumnSpec {
    std::string name;
    ColumnType type = ColumnType::numeric;
    CovariateRole role = CovariateRole::gps;
};

struct CsvSchema {
    std::vector<ColumnSpec> covariates;
    std::string outcome_column;
    std::string treatment_column;
    std::vector<std::string> treatment_levels;  // label order defines 1..Z
};

struct IngestResult {
    Dataset data;          // unit ids are the 0-based data-row positions
    int rows_read = 0;     // data rows in the file
    int rows_dropped = 0;  // rows with a missing value in a schema column
};

// Comma-separated UTF-8 text with a header row. Empty fields, "NA" (any
// case) and "." count as missing; a row missing any schema-referenced value
// is dropped and counted. Throws SchemaMismatch, UnparseableValue,
// EmptyAfterFiltering.
IngestResult ingest(const std::string& path, const CsvSchema& schema);
IngestResult ingest_text(const std::string& csv_text, const CsvSchema& schema);

}  // namespace ordcausal
