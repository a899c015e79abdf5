#include "eqsat/symbol.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace eqsat {
namespace {

class Interner {
 public:
  uint32_t intern(std::string_view name) {
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    auto id = static_cast<uint32_t>(names_.size());
    const std::string &stored = names_.emplace_back(name);
    index_.emplace(std::string_view(stored), id);
    return id;
  }

  std::string_view lookup(uint32_t id) {
    std::lock_guard lock(mutex_);
    return names_.at(id);
  }

 private:
  std::mutex mutex_;
  // deque keeps element addresses stable, so the views used as keys stay valid
  std::deque<std::string> names_;
  std::unordered_map<std::string_view, uint32_t> index_;
};

Interner &interner() {
  static Interner instance;
  return instance;
}

}  // namespace

Symbol::Symbol(std::string_view name) : index_(interner().intern(name)) {}

std::string_view Symbol::str() const { return interner().lookup(index_); }

}  // namespace eqsat
