#pragma once

#include "rsense/characters.hpp"
#include "rsense/field.hpp"
#include "rsense/primes.hpp"
#include "rsense/recovery.hpp"
#include "rsense/rip.hpp"
#include "rsense/rng.hpp"
#include "rsense/sensing.hpp"
#include "rsense/util.hpp"
#include "rsense/verify.hpp"
#include "rsense/version.hpp"
