// errors.hpp - exception taxonomy; categories map to process exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace spectral_torus {

enum class error_category {
    validation,  // exit code 2
    numerical,   // exit code 3
    io           // exit code 4
};

class error : public std::runtime_error {
  public:
    error(error_category cat, std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), cat_(cat), kind_(std::move(kind)) {}
    error_category category() const { return cat_; }
    const std::string& kind() const { return kind_; }

  private:
    error_category cat_;
    std::string kind_;
};

#define SPECTRAL_TORUS_ERROR(Name, Cat)                                        \
    class Name : public error {                                               \
      public:                                                                 \
        explicit Name(const std::string& msg)                                 \
            : error(error_category::Cat, #Name, msg) {}                       \
    };

SPECTRAL_TORUS_ERROR(domain_error, validation)
SPECTRAL_TORUS_ERROR(symmetry_error, validation)
SPECTRAL_TORUS_ERROR(schema_error, validation)
SPECTRAL_TORUS_ERROR(parse_error, validation)

SPECTRAL_TORUS_ERROR(solve_error, numerical)
SPECTRAL_TORUS_ERROR(geometry_error, numerical)
SPECTRAL_TORUS_ERROR(continuation_error, numerical)
SPECTRAL_TORUS_ERROR(max_refinement_error, numerical)
SPECTRAL_TORUS_ERROR(pole_on_path_error, numerical)
SPECTRAL_TORUS_ERROR(singular_system_error, numerical)
SPECTRAL_TORUS_ERROR(coincident_zeta_error, numerical)
SPECTRAL_TORUS_ERROR(root_finding_error, numerical)
SPECTRAL_TORUS_ERROR(lift_error, numerical)
SPECTRAL_TORUS_ERROR(zero_vector_error, numerical)
SPECTRAL_TORUS_ERROR(step_error, numerical)
SPECTRAL_TORUS_ERROR(fit_error, numerical)
SPECTRAL_TORUS_ERROR(stencil_error, numerical)
SPECTRAL_TORUS_ERROR(degenerate_t_error, numerical)
SPECTRAL_TORUS_ERROR(degenerate_configuration_error, numerical)
SPECTRAL_TORUS_ERROR(no_convergence_error, numerical)
SPECTRAL_TORUS_ERROR(left_domain_error, numerical)
SPECTRAL_TORUS_ERROR(singular_jacobian_error, numerical)
SPECTRAL_TORUS_ERROR(convergence_error, numerical)

SPECTRAL_TORUS_ERROR(io_error, io)

#undef SPECTRAL_TORUS_ERROR

inline int exit_code_for(const error& e) {
    switch (e.category()) {
        case error_category::validation: return 2;
        case error_category::numerical: return 3;
        case error_category::io: return 4;
    }
    return 1;
}

}  // namespace spectral_torus
