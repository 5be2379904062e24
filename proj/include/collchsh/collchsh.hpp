#pragma once

#include "collchsh/chsh.hpp"
#include "collchsh/common.hpp"
#include "collchsh/io.hpp"
#include "collchsh/linalg.hpp"
#include "collchsh/optimize.hpp"
#include "collchsh/oracle.hpp"
#include "collchsh/protocol.hpp"
#include "collchsh/random.hpp"
#include "collchsh/states.hpp"
#include "collchsh/version.hpp"
