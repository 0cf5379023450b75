#ifndef APSQ_APSQ_HPP
#define APSQ_APSQ_HPP

#include "apsq/coloring.hpp"
#include "apsq/congruence.hpp"
#include "apsq/extremal.hpp"
#include "apsq/factor.hpp"
#include "apsq/faltings.hpp"
#include "apsq/integer.hpp"
#include "apsq/parallel.hpp"
#include "apsq/squares.hpp"

#endif  // APSQ_APSQ_HPP
