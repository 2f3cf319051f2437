#pragma once

#include <string>
#include <variant>

#include "patientsim/core/types.hpp"

namespace patientsim {

struct AddPrinciple {
    Principle principle;
};

struct EditPrinciple {
    std::string principle_id;
    std::string text;
};

struct DeletePrinciple {
    std::string principle_id;
};

using ConstitutionChange = std::variant<AddPrinciple, EditPrinciple, DeletePrinciple>;

// Returns a new constitution at version + 1. The input is left untouched.
// Throws NotFoundError when an edit or delete names an unknown principle,
// ValidationError for an invalid or duplicate added principle.
Constitution bump_constitution(const Constitution& constitution, const ConstitutionChange& change);

}  // namespace patientsim
