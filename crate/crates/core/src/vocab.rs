//! Closed tag vocabularies shared by the database, queries and labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn squash(text: &str) -> String {
    text.trim()
        .to_ascii_lowercase()
        .replace(['-', '_'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

macro_rules! tag_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownTag {
    pub vocabulary: &'static str,
    pub tag: String,
}

impl fmt::Display for UnknownTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown {} tag {:?}", self.vocabulary, self.tag)
    }
}

impl std::error::Error for UnknownTag {}

fn unknown(vocabulary: &'static str, tag: &str) -> UnknownTag {
    UnknownTag { vocabulary, tag: tag.to_string() }
}

/// Room type of a listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoomType {
    EntireHome,
    PrivateRoom,
    SharedRoom,
}

impl RoomType {
    pub const ALL: [RoomType; 3] = [RoomType::EntireHome, RoomType::PrivateRoom, RoomType::SharedRoom];

    pub fn as_str(self) -> &'static str {
        match self {
            RoomType::EntireHome => "entire-home",
            RoomType::PrivateRoom => "private-room",
            RoomType::SharedRoom => "shared-room",
        }
    }
}

impl FromStr for RoomType {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match squash(s).trim_end_matches("/apt") {
            "entire home" | "entire room" => Ok(RoomType::EntireHome),
            "private room" => Ok(RoomType::PrivateRoom),
            "shared room" => Ok(RoomType::SharedRoom),
            _ => Err(unknown("room type", s)),
        }
    }
}

tag_serde!(RoomType);

/// Something a guest may bring; a listing rule "No X" forbids it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HouseRule {
    Parties,
    Smoking,
    ChildrenUnder10,
    Pets,
    Visitors,
}

impl HouseRule {
    pub const ALL: [HouseRule; 5] = [
        HouseRule::Parties,
        HouseRule::Smoking,
        HouseRule::ChildrenUnder10,
        HouseRule::Pets,
        HouseRule::Visitors,
    ];

    /// Query spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            HouseRule::Parties => "parties",
            HouseRule::Smoking => "smoking",
            HouseRule::ChildrenUnder10 => "children under 10",
            HouseRule::Pets => "pets",
            HouseRule::Visitors => "visitors",
        }
    }

    /// Listing spelling, e.g. `No parties`.
    pub fn prohibition(self) -> String {
        format!("No {}", self.as_str())
    }

    /// Tag used in the CSV files, e.g. `no-parties`.
    pub fn listing_tag(self) -> String {
        format!("no-{}", self.as_str().replace(' ', "-"))
    }

    /// Parses a listing rule such as `No parties` or `no-children-under-10`.
    pub fn from_prohibition(s: &str) -> Result<Self, UnknownTag> {
        let t = squash(s);
        match t.strip_prefix("no ") {
            Some(rest) => rest.parse().map_err(|_| unknown("house rule", s)),
            None => Err(unknown("house rule", s)),
        }
    }
}

impl FromStr for HouseRule {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match squash(s).as_ref() {
            "parties" => Ok(HouseRule::Parties),
            "smoking" => Ok(HouseRule::Smoking),
            "children under 10" => Ok(HouseRule::ChildrenUnder10),
            "pets" => Ok(HouseRule::Pets),
            "visitors" => Ok(HouseRule::Visitors),
            _ => Err(unknown("house rule", s)),
        }
    }
}

tag_serde!(HouseRule);

/// Requested room type in a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HouseType {
    EntireRoom,
    PrivateRoom,
    SharedRoom,
    NotSharedRoom,
}

impl HouseType {
    pub const ALL: [HouseType; 4] =
        [HouseType::EntireRoom, HouseType::PrivateRoom, HouseType::SharedRoom, HouseType::NotSharedRoom];

    pub fn as_str(self) -> &'static str {
        match self {
            HouseType::EntireRoom => "entire room",
            HouseType::PrivateRoom => "private room",
            HouseType::SharedRoom => "shared room",
            HouseType::NotSharedRoom => "not shared room",
        }
    }

    pub fn accepts(self, room: RoomType) -> bool {
        match self {
            HouseType::EntireRoom => room == RoomType::EntireHome,
            HouseType::PrivateRoom => room == RoomType::PrivateRoom,
            HouseType::SharedRoom => room == RoomType::SharedRoom,
            HouseType::NotSharedRoom => room != RoomType::SharedRoom,
        }
    }
}

impl FromStr for HouseType {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match squash(s).as_ref() {
            "entire room" | "entire home" => Ok(HouseType::EntireRoom),
            "private room" => Ok(HouseType::PrivateRoom),
            "shared room" => Ok(HouseType::SharedRoom),
            "not shared room" | "no shared room" => Ok(HouseType::NotSharedRoom),
            _ => Err(unknown("room type", s)),
        }
    }
}

tag_serde!(HouseType);

/// Transportation preference. `Flight` means every leg is flown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Transportation {
    NoFlight,
    NoSelfDriving,
    Flight,
}

impl Transportation {
    pub const ALL: [Transportation; 3] =
        [Transportation::NoFlight, Transportation::NoSelfDriving, Transportation::Flight];

    pub fn as_str(self) -> &'static str {
        match self {
            Transportation::NoFlight => "no flight",
            Transportation::NoSelfDriving => "no self-driving",
            Transportation::Flight => "flight",
        }
    }
}

impl FromStr for Transportation {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match squash(s).as_ref() {
            "no flight" => Ok(Transportation::NoFlight),
            "no self driving" => Ok(Transportation::NoSelfDriving),
            "flight" => Ok(Transportation::Flight),
            _ => Err(unknown("transportation", s)),
        }
    }
}

tag_serde!(Transportation);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlightRule {
    NonStop,
}

impl FlightRule {
    pub fn as_str(self) -> &'static str {
        "non-stop"
    }
}

impl FromStr for FlightRule {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match squash(s).as_ref() {
            "non stop" | "nonstop" => Ok(FlightRule::NonStop),
            _ => Err(unknown("flight rule", s)),
        }
    }
}

tag_serde!(FlightRule);

pub const CUISINES: [&str; 7] = ["Chinese", "American", "Italian", "Mexican", "Indian", "Mediterranean", "French"];

pub const CATEGORIES: [&str; 12] = [
    "Park",
    "Garden",
    "Museum",
    "Historical Landmarks",
    "Beach",
    "Zoo",
    "Aquarium",
    "Art Gallery",
    "Shopping",
    "Theater",
    "Religious Site",
    "Viewpoint",
];

fn canonical(list: &'static [&'static str], vocabulary: &'static str, s: &str) -> Result<&'static str, UnknownTag> {
    let want = squash(s);
    list.iter().copied().find(|c| squash(c) == want).ok_or_else(|| unknown(vocabulary, s))
}

/// Canonical spelling of a cuisine tag.
pub fn cuisine(s: &str) -> Result<&'static str, UnknownTag> {
    canonical(&CUISINES, "cuisine", s)
}

/// Canonical spelling of an attraction category tag.
pub fn category(s: &str) -> Result<&'static str, UnknownTag> {
    canonical(&CATEGORIES, "attraction category", s)
}
