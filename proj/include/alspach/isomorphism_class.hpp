#ifndef ALSPACH_ISOMORPHISM_CLASS_HPP
#define ALSPACH_ISOMORPHISM_CLASS_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace alspach {

enum class IsoClass {
  EllP,
  Ell2,
  Ell2PlusEllP,
  XP,
  BP,
  SumEll2,        ///< (sum l2)_lp
  SumEll2PlusXP,  ///< (sum l2)_lp (+) X_p
  BPPlusXP,
  SumXP,          ///< (sum X_p)_lp
  Unclassified,
};

inline constexpr std::array<IsoClass, 9> kNamedClasses = {
    IsoClass::EllP, IsoClass::Ell2,          IsoClass::Ell2PlusEllP, IsoClass::XP,    IsoClass::BP,
    IsoClass::SumEll2, IsoClass::SumEll2PlusXP, IsoClass::BPPlusXP, IsoClass::SumXP,
};

inline const char* to_string(IsoClass c) {
  switch (c) {
    case IsoClass::EllP: return "ELL_P";
    case IsoClass::Ell2: return "ELL_2";
    case IsoClass::Ell2PlusEllP: return "ELL2_PLUS_ELLP";
    case IsoClass::XP: return "X_P";
    case IsoClass::BP: return "B_P";
    case IsoClass::SumEll2: return "SUM_ELL2_IN_ELLP";
    case IsoClass::SumEll2PlusXP: return "SUM_ELL2_IN_ELLP_PLUS_XP";
    case IsoClass::BPPlusXP: return "BP_PLUS_XP";
    case IsoClass::SumXP: return "SUM_XP_IN_ELLP";
    case IsoClass::Unclassified: return "UNCLASSIFIED";
  }
  return "?";
}

inline IsoClass parse_iso_class(std::string_view s) {
  for (IsoClass c : kNamedClasses)
    if (s == to_string(c)) return c;
  if (s == "UNCLASSIFIED") return IsoClass::Unclassified;
  fail(ErrorCode::Parse, "unknown isomorphism class '" + std::string(s) + "'");
}

/// A class, or UNCLASSIFIED with the unmet hypothesis.
struct ClassOutcome {
  IsoClass cls = IsoClass::Unclassified;
  std::string reason;

  bool classified() const { return cls != IsoClass::Unclassified; }
  static ClassOutcome of(IsoClass c) { return {c, {}}; }
  static ClassOutcome unclassified(std::string why) { return {IsoClass::Unclassified, std::move(why)}; }
};

namespace detail {

// Each class is a join of features; l2-type features are ordered
// none < l2 < (sum l2)_lp < B_p.
struct Features {
  bool ellp = false;
  int ell2_level = 0;  // 0 none, 1 l2, 2 (sum l2)_lp, 3 B_p
  bool xp = false;
  bool sum_xp = false;
};

inline Features features_of(IsoClass c) {
  switch (c) {
    case IsoClass::EllP: return {true, 0, false, false};
    case IsoClass::Ell2: return {false, 1, false, false};
    case IsoClass::Ell2PlusEllP: return {true, 1, false, false};
    case IsoClass::XP: return {false, 0, true, false};
    case IsoClass::BP: return {false, 3, false, false};
    case IsoClass::SumEll2: return {false, 2, false, false};
    case IsoClass::SumEll2PlusXP: return {false, 2, true, false};
    case IsoClass::BPPlusXP: return {false, 3, true, false};
    case IsoClass::SumXP: return {false, 0, false, true};
    case IsoClass::Unclassified: break;
  }
  fail(ErrorCode::NotSimplifiable, "UNCLASSIFIED cannot enter a direct sum");
}

inline IsoClass class_of(const Features& f) {
  if (f.sum_xp) return IsoClass::SumXP;
  if (f.xp) {
    switch (f.ell2_level) {
      case 0:
      case 1: return IsoClass::XP;
      case 2: return IsoClass::SumEll2PlusXP;
      default: return IsoClass::BPPlusXP;
    }
  }
  switch (f.ell2_level) {
    case 3: return IsoClass::BP;
    case 2: return IsoClass::SumEll2;
    case 1: return f.ellp ? IsoClass::Ell2PlusEllP : IsoClass::Ell2;
    default: return IsoClass::EllP;
  }
}

}  // namespace detail

/// Class of the direct sum of the given classes.
inline IsoClass simplify_sum(const std::vector<IsoClass>& classes) {
  require(!classes.empty(), ErrorCode::NotSimplifiable, "empty direct sum");
  detail::Features acc;
  for (IsoClass c : classes) {
    detail::Features f = detail::features_of(c);
    acc.ellp = acc.ellp || f.ellp;
    acc.ell2_level = std::max(acc.ell2_level, f.ell2_level);
    acc.xp = acc.xp || f.xp;
    acc.sum_xp = acc.sum_xp || f.sum_xp;
  }
  return detail::class_of(acc);
}

}  // namespace alspach

#endif  // ALSPACH_ISOMORPHISM_CLASS_HPP
