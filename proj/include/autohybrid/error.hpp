#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace autohybrid {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define AUTOHYBRID_DEFINE_ERROR(Name)             \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

// configuration spaces
AUTOHYBRID_DEFINE_ERROR(InvalidSpace);
AUTOHYBRID_DEFINE_ERROR(NonEnumerable);
AUTOHYBRID_DEFINE_ERROR(UnresolvedParent);
AUTOHYBRID_DEFINE_ERROR(InvalidConfig);

// learners and models
AUTOHYBRID_DEFINE_ERROR(InvalidSpec);
AUTOHYBRID_DEFINE_ERROR(InvalidDataset);
AUTOHYBRID_DEFINE_ERROR(FitFailure);
AUTOHYBRID_DEFINE_ERROR(DimensionMismatch);
AUTOHYBRID_DEFINE_ERROR(SchemaMismatch);

// search
AUTOHYBRID_DEFINE_ERROR(AllFitsFailed);
AUTOHYBRID_DEFINE_ERROR(EmptyRanking);

// evaluation
AUTOHYBRID_DEFINE_ERROR(TooFewRows);
AUTOHYBRID_DEFINE_ERROR(LengthMismatch);
AUTOHYBRID_DEFINE_ERROR(EmptyInput);
AUTOHYBRID_DEFINE_ERROR(NonPositiveNormalizer);
AUTOHYBRID_DEFINE_ERROR(TooFewValues);

// renewables
AUTOHYBRID_DEFINE_ERROR(InvalidCurve);
AUTOHYBRID_DEFINE_ERROR(MisalignedSeries);
AUTOHYBRID_DEFINE_ERROR(DegeneratePrediction);
AUTOHYBRID_DEFINE_ERROR(UnknownPlant);

// ingestion
AUTOHYBRID_DEFINE_ERROR(MissingTarget);
AUTOHYBRID_DEFINE_ERROR(EmptyFile);
AUTOHYBRID_DEFINE_ERROR(ParseError);

#undef AUTOHYBRID_DEFINE_ERROR

/// A cell that could not be read as a number; row is 1-based over data rows.
class NonNumericCell : public Error {
public:
    NonNumericCell(std::size_t row, std::string column, const std::string& cell)
        : Error("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                ", column '" + column + "'"),
          row_(row), column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

} // namespace autohybrid
