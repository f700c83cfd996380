#pragma once

#include <stdexcept>
#include <string>

namespace pgl2k {

// Base class for every error thrown by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

#define PGL2K_DEFINE_ERROR(name)                                        \
    class name : public error {                                         \
    public:                                                              \
        explicit name(const std::string& what) : error(what) {}          \
    }

PGL2K_DEFINE_ERROR(bad_field_spec);
PGL2K_DEFINE_ERROR(field_mismatch);
PGL2K_DEFINE_ERROR(division_by_zero);
PGL2K_DEFINE_ERROR(zero_input);
PGL2K_DEFINE_ERROR(unsupported_field);
PGL2K_DEFINE_ERROR(characteristic_divides_order);
PGL2K_DEFINE_ERROR(missing_roots_of_unity);
PGL2K_DEFINE_ERROR(not_embeddable);
PGL2K_DEFINE_ERROR(outside_paper_scope);
PGL2K_DEFINE_ERROR(closure_exceeds_cap);
PGL2K_DEFINE_ERROR(cap_exceeded);
PGL2K_DEFINE_ERROR(dimension_error);
PGL2K_DEFINE_ERROR(unrecognized_type);
PGL2K_DEFINE_ERROR(no_solution);
PGL2K_DEFINE_ERROR(search_exhausted);
PGL2K_DEFINE_ERROR(symbol_obstruction);
PGL2K_DEFINE_ERROR(klein_four_redirect);
PGL2K_DEFINE_ERROR(not_a_subgroup);
PGL2K_DEFINE_ERROR(invalid_action);
PGL2K_DEFINE_ERROR(hypothesis_failure);
PGL2K_DEFINE_ERROR(io_error);
PGL2K_DEFINE_ERROR(schema_mismatch);

#undef PGL2K_DEFINE_ERROR

} // namespace pgl2k
