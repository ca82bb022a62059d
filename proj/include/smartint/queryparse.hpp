#ifndef SMARTINT_QUERYPARSE_HPP
#define SMARTINT_QUERYPARSE_HPP

#include "smartint/table.hpp"

namespace smartint {

struct QueryParseError : std::runtime_error {
    std::size_t position; // byte offset into the query string
    QueryParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg), position(pos) {}
};

// SELECT a, b WHERE c < v AND d = 'v'   |   SELECT *
// Keywords are case-insensitive; values may be quoted; a leading '$' on a
// numeric literal is ignored. Errors carry the offending position and the
// what() string includes a caret line.
Query parse_query(const std::string& text);

std::string query_to_string(const Query& q);

} // namespace smartint

#endif
