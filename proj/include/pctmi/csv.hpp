#pragma once

#include "pctmi/series.hpp"

#include <iosfwd>
#include <string>

namespace pctmi {

enum class CsvLayout { Auto, Wide, Long };

/// Wide: a header of series names, one column per series and an optional leading "time" column
/// (which must be evenly spaced); every series gets rate 1.
/// Long: columns series,time,value. Each series' spacing is its median time step and must be
/// constant; the time unit is the largest spacing, so rates are unit / spacing and must be integral.
/// Auto picks Long when the header is exactly series,time,value. Throws ParseError.
Dataset read_csv(std::istream& in, CsvLayout layout = CsvLayout::Auto);
Dataset read_csv_file(const std::string& path, CsvLayout layout = CsvLayout::Auto);

/// Wide when all rates and start times agree, long otherwise.
void write_csv(std::ostream& out, const Dataset& data);
void write_wide_csv(std::ostream& out, const Dataset& data);
void write_long_csv(std::ostream& out, const Dataset& data);

}  // namespace pctmi
