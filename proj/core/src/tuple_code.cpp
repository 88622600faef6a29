#include "nildual/tuple_code.hpp"

#include <string>

#include "nildual/error.hpp"

namespace nildual {

Code checked_pow(std::size_t base, std::size_t exp) {
  Code r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > (Code{1} << 62) / base) {
      throw InputError("tuple space " + std::to_string(base) + "^" + std::to_string(exp) +
                       " is too large to encode");
    }
    r *= base;
  }
  return r;
}

Code encode(std::span<const Elem> tuple, int universe) {
  Code c = 0;
  for (std::size_t i = tuple.size(); i-- > 0;) {
    c = c * static_cast<Code>(universe) + tuple[i];
  }
  return c;
}

void decode(Code code, int universe, std::span<Elem> out) {
  for (auto& x : out) {
    x = static_cast<Elem>(code % static_cast<Code>(universe));
    code /= static_cast<Code>(universe);
  }
}

std::vector<Elem> decode(Code code, int arity, int universe) {
  std::vector<Elem> t(static_cast<std::size_t>(arity));
  decode(code, universe, t);
  return t;
}

}  // namespace nildual
