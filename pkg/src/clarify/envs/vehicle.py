"""Vehicle controls: engine, fuel, doors, climate, brakes, cruise control.

Fuel is tracked in gallons against a 50 gallon tank. Cruise control can
only be switched on while the engine runs.
"""

from __future__ import annotations

from functools import lru_cache

from ..schema import Boolean, Finite, ListOf, NumericRange, Text, ToolSchema, Toolkit
from .base import DomainUpdateRule, Environment, P

TANK = 50.0
DOORS = ("driver", "passenger", "rear_left", "rear_right")
SPEEDS = tuple(range(0, 125, 5))
MPG = 20.0

CITY_ZIPS = {
    "Rivermist": "83214",
    "Stonebrook": "74532",
    "Maplecrest": "56108",
    "Silverpine": "62947",
    "Shadowridge": "71354",
    "Sunset Valley": "84671",
    "Oakendale": "49218",
    "Willowbend": "52491",
    "Crescent Hollow": "69238",
    "Autumnville": "57912",
}
STATUS_OPTIONS = ("fuel", "battery", "doors", "climate", "headlights", "parkingBrake", "brakePedal", "engine")


@lru_cache(maxsize=None)
def toolkit() -> Toolkit:
    zips = Finite(tuple(CITY_ZIPS.values()))
    cities = Finite(tuple(CITY_ZIPS))
    return Toolkit((
        ToolSchema("startEngine", (P("ignitionMode", Finite(("START", "STOP"))),)),
        ToolSchema("fillFuelTank", (P("fuelAmount", NumericRange(0.0, TANK), dep=True),)),
        ToolSchema("lockDoors", (P("unlock", Boolean()), P("door", ListOf(Finite(DOORS)), dep=True))),
        ToolSchema("adjustClimateControl", (
            P("temperature", NumericRange(-10, 50)),
            P("unit", Finite(("celsius", "fahrenheit")), required=False, default=True),
            P("fanSpeed", NumericRange(0, 100, True), required=False, default=True),
            P("mode", Finite(("auto", "cool", "heat", "defrost")), required=False, default=True),
        )),
        ToolSchema("get_outside_temperature_from_google", ()),
        ToolSchema("get_outside_temperature_from_weather_com", ()),
        ToolSchema("setHeadlights", (P("mode", Finite(("on", "off", "auto"))),)),
        ToolSchema("displayCarStatus", (P("option", Finite(STATUS_OPTIONS)),)),
        ToolSchema("activateParkingBrake", (P("mode", Finite(("engage", "release"))),)),
        ToolSchema("pressBrakePedal", (P("pedalPosition", NumericRange(0.0, 1.0)),)),
        ToolSchema("releaseBrakePedal", ()),
        ToolSchema("setCruiseControl", (
            P("speed", Finite(SPEEDS), dep=True),
            P("activate", Boolean(), dep=True),
            P("distanceToNextVehicle", NumericRange(0, 1000)),
        )),
        ToolSchema("get_current_speed", ()),
        ToolSchema("display_log", (P("messages", ListOf(Text())),)),
        ToolSchema("estimate_drive_feasibility_by_mileage", (P("distance", NumericRange(0, 10000)),)),
        ToolSchema("liter_to_gallon", (P("liter", NumericRange(0, 1000)),)),
        ToolSchema("gallon_to_liter", (P("gallon", NumericRange(0, 1000)),)),
        ToolSchema("estimate_distance", (P("cityA", zips), P("cityB", zips))),
        ToolSchema("get_zipcode_based_on_city", (P("city", cities),)),
        ToolSchema("set_navigation", (P("destination", Text()),)),
        ToolSchema("check_tire_pressure", ()),
        ToolSchema("find_nearest_tire_shop", ()),
    ))


# Calls that succeed on the fixture state, one fresh environment each.
SAMPLES = (
    ("startEngine", {"ignitionMode": "START"}),
    ("fillFuelTank", {"fuelAmount": 15.0}),
    ("lockDoors", {"unlock": True, "door": ["driver", "passenger"]}),
    ("adjustClimateControl", {"temperature": 22, "unit": "celsius", "fanSpeed": 60, "mode": "cool"}),
    ("setHeadlights", {"mode": "on"}),
    ("displayCarStatus", {"option": "fuel"}),
    ("activateParkingBrake", {"mode": "release"}),
    ("pressBrakePedal", {"pedalPosition": 0.5}),
    ("setCruiseControl", {"speed": 0, "activate": False, "distanceToNextVehicle": 100}),
    ("estimate_distance", {"cityA": "83214", "cityB": "74532"}),
    ("get_zipcode_based_on_city", {"city": "Maplecrest"}),
    ("liter_to_gallon", {"liter": 40}),
    ("estimate_drive_feasibility_by_mileage", {"distance": 300}),
    ("set_navigation", {"destination": "123 Main St"}),
    ("display_log", {"messages": ["check tires"]}),
)


class VehicleEnv(Environment):
    sample_table = SAMPLES
    name = "vehicle"
    defaults = {"adjustClimateControl": {"unit": "celsius", "fanSpeed": 50, "mode": "auto"}}

    @classmethod
    def toolkit(cls) -> Toolkit:
        return toolkit()

    def build_rules(self) -> list:
        return [
            DomainUpdateRule(
                "fillFuelTank",
                (("fillFuelTank", "fuelAmount"),),
                lambda s: NumericRange(0.0, max(0.0, TANK - s["fuel"])),
                "current fuel -> addable amount",
            ),
            DomainUpdateRule(
                "lockDoors",
                (("lockDoors", "door"),),
                lambda s: ListOf(Finite(tuple(sorted(s["doors"], key=DOORS.index)))),
                "door status -> operable doors",
            ),
            DomainUpdateRule(
                "startEngine",
                (("setCruiseControl", "activate"),),
                lambda s: Boolean() if s["engine"] == "running" else Finite((False,)),
                "engine state -> cruise control availability",
            ),
            DomainUpdateRule(
                "startEngine",
                (("setCruiseControl", "speed"),),
                lambda s: Finite(SPEEDS) if s["engine"] == "running" else Finite((0,)),
                "engine state -> selectable cruise speeds",
            ),
        ]

    # -- tools ----------------------------------------------------------------

    def do_startEngine(self, ignitionMode):
        if ignitionMode == "START":
            self.state["engine"] = "running"
        else:
            self.state["engine"] = "stopped"
            self.state["cruise"] = {"active": False, "speed": 0, "distance": 0}
        return self.state["engine"]

    def do_fillFuelTank(self, fuelAmount):
        self.state["fuel"] = round(self.state["fuel"] + fuelAmount, 6)
        return self.state["fuel"]

    def do_lockDoors(self, unlock, door):
        for d in door:
            self.state["doors"][d] = "unlocked" if unlock else "locked"
        return dict(self.state["doors"])

    def do_adjustClimateControl(self, temperature, unit="celsius", fanSpeed=50, mode="auto"):
        celsius = temperature if unit == "celsius" else round((temperature - 32) * 5 / 9, 4)
        self.state["climate"] = {"temperature": celsius, "fanSpeed": fanSpeed, "mode": mode}
        return self.state["climate"]

    def do_get_outside_temperature_from_google(self):
        return self.state["outside_temperature"]

    def do_get_outside_temperature_from_weather_com(self):
        return self.state["outside_temperature"]

    def do_setHeadlights(self, mode):
        self.state["headlights"] = mode

    def do_displayCarStatus(self, option):
        key = {"parkingBrake": "parking_brake", "brakePedal": "brake_pedal"}.get(option, option)
        return self.state.get(key)

    def do_activateParkingBrake(self, mode):
        self.state["parking_brake"] = "engaged" if mode == "engage" else "released"

    def do_pressBrakePedal(self, pedalPosition):
        self.state["brake_pedal"] = pedalPosition

    def do_releaseBrakePedal(self):
        self.state["brake_pedal"] = 0.0

    def do_setCruiseControl(self, speed, activate, distanceToNextVehicle):
        self.state["cruise"] = {"active": activate, "speed": speed, "distance": distanceToNextVehicle}
        return self.state["cruise"]

    def do_get_current_speed(self):
        return self.state["cruise"]["speed"] if self.state["cruise"]["active"] else self.state["speed"]

    def do_display_log(self, messages):
        self.state["log"].extend(messages)
        return list(messages)

    def do_estimate_drive_feasibility_by_mileage(self, distance):
        return distance <= self.state["fuel"] * MPG

    def do_liter_to_gallon(self, liter):
        return round(liter * 0.264172, 6)

    def do_gallon_to_liter(self, gallon):
        return round(gallon * 3.78541, 6)

    def do_estimate_distance(self, cityA, cityB):
        if cityA == cityB:
            return 0.0
        a, b = sorted((int(cityA), int(cityB)))
        return float((b - a) % 997 + 10)

    def do_get_zipcode_based_on_city(self, city):
        return CITY_ZIPS[city]

    def do_set_navigation(self, destination):
        self.state["navigation"] = destination

    def do_check_tire_pressure(self):
        return self.state["tire_pressure"]

    def do_find_nearest_tire_shop(self):
        return "456 Oakwood Avenue, Rivermist, 83214"
