#include "patientsim/core/constitution.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "patientsim/error.hpp"

namespace patientsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<Principle>::iterator locate(std::vector<Principle>& principles, const std::string& id) {
    auto it = std::find_if(principles.begin(), principles.end(),
                           [&](const Principle& p) { return p.id == id; });
    if (it == principles.end()) throw NotFoundError(fmt::format("principle '{}' not found", id));
    return it;
}

}  // namespace

Constitution bump_constitution(const Constitution& constitution, const ConstitutionChange& change) {
    Constitution next = constitution;
    std::visit(overloaded{
                   [&](const AddPrinciple& add) {
                       add.principle.validate();
                       if (next.find(add.principle.id)) {
                           throw ValidationError(
                               fmt::format("principle '{}' already exists", add.principle.id));
                       }
                       next.principles.push_back(add.principle);
                   },
                   [&](const EditPrinciple& edit) {
                       auto it = locate(next.principles, edit.principle_id);
                       if (is_blank(edit.text)) {
                           throw ValidationError("principle text must not be empty");
                       }
                       it->text = edit.text;
                       it->edited = true;
                   },
                   [&](const DeletePrinciple& del) {
                       next.principles.erase(locate(next.principles, del.principle_id));
                   },
               },
               change);
    next.version = constitution.version + 1;
    return next;
}

}  // namespace patientsim
