#pragma once

#include <iosfwd>

#include "ppmaudit/model.hpp"

namespace ppmaudit::detail {

void write_xes(const EventLog& log, std::ostream& out);
void write_csv(const EventLog& log, std::ostream& out);

}  // namespace ppmaudit::detail
