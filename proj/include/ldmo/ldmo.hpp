#ifndef LDMO_LDMO_HPP
#define LDMO_LDMO_HPP

#include "engine.hpp"
#include "geometry.hpp"
#include "linesearch.hpp"
#include "objective.hpp"
#include "verify.hpp"

#endif
