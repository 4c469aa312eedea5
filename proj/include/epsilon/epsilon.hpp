#pragma once

#include "critical.hpp"
#include "driver.hpp"
#include "errors.hpp"
#include "gen.hpp"
#include "injury.hpp"
#include "io.hpp"
#include "ordinal.hpp"
#include "parse.hpp"
#include "subst.hpp"
#include "syntax.hpp"
#include "trees.hpp"
