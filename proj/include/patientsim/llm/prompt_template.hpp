#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace patientsim::llm {

using SlotBindings = std::map<std::string, std::string, std::less<>>;

// A prompt body with named `{slot}` regions. Only braces enclosing a declared
// slot name are substituted; every other byte, including literal JSON braces
// in one-shot exemplars, is copied through unchanged.
class PromptTemplate {
public:
    PromptTemplate(std::string name, std::string body, std::set<std::string, std::less<>> required_slots);

    const std::string& name() const noexcept { return name_; }
    const std::string& body() const noexcept { return body_; }
    const std::set<std::string, std::less<>>& required_slots() const noexcept { return slots_; }

    // Throws RenderError naming the first unbound required slot. Bindings for
    // names that are not slots are ignored.
    std::string render(const SlotBindings& bindings) const;

private:
    std::string name_;
    std::string body_;
    std::set<std::string, std::less<>> slots_;
};

class TemplateRegistry {
public:
    void add(PromptTemplate tmpl);
    bool contains(std::string_view name) const;
    const PromptTemplate& get(std::string_view name) const;
    std::string render(std::string_view name, const SlotBindings& bindings) const;
    std::set<std::string> names() const;

    // Registry holding every built-in template (see templates.hpp).
    static const TemplateRegistry& builtin();

private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace patientsim::llm
