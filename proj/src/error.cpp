#include "distdelay/error.hpp"

namespace distdelay {

HistoryGapError::HistoryGapError(double from, double to, const std::string& what)
    : Error(what)
    , from_(from)
    , to_(to)
{
}

DivergenceError::DivergenceError(double last_valid_time, const std::string& what)
    : Error(what)
    , last_valid_time_(last_valid_time)
{
}

}  // namespace distdelay
