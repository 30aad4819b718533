#pragma once

#include <string>

namespace platemr {

enum class Verdict { pass, fail, skipped };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::skipped:
      return "skipped";
  }
  return "fail";
}

}  // namespace platemr
