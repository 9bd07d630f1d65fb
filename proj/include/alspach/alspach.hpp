#ifndef ALSPACH_ALSPACH_HPP
#define ALSPACH_ALSPACH_HPP

#include "error.hpp"
#include "rational.hpp"
#include "weight_family.hpp"
#include "profile.hpp"
#include "partition.hpp"
#include "space.hpp"
#include "norm.hpp"
#include "isomorphism_class.hpp"
#include "classifier.hpp"
#include "verifier.hpp"
#include "io.hpp"

#endif  // ALSPACH_ALSPACH_HPP
