#pragma once

#include <string>
#include <vector>

#include "lazyref/ast.hpp"

namespace lazyref {

// Ordered sequence of binder:type pairs; lookup returns the most recent
// binding. The checker freshens names before extending, so well-formed
// environments have unique names.
class TEnv {
 public:
  using Binding = std::pair<std::string, RTypePtr>;

  void push(std::string name, RTypePtr type) {
    bindings_.emplace_back(std::move(name), std::move(type));
  }
  void pop() { bindings_.pop_back(); }

  const RTypePtr* lookup(const std::string& name) const {
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
  bool contains(const std::string& name) const { return lookup(name) != nullptr; }

  const std::vector<Binding>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }

  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& [n, t] : bindings_) out.insert(n);
    return out;
  }

 private:
  std::vector<Binding> bindings_;
};

// RAII environment extension.
class ScopedBinding {
 public:
  ScopedBinding(TEnv& env, std::string name, RTypePtr type) : env_(env) {
    env_.push(std::move(name), std::move(type));
  }
  ~ScopedBinding() { env_.pop(); }
  ScopedBinding(const ScopedBinding&) = delete;
  ScopedBinding& operator=(const ScopedBinding&) = delete;

 private:
  TEnv& env_;
};

}  // namespace lazyref
