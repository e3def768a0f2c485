use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::path::Path;

use chrono::NaiveDate;

use super::{
    field, AccommodationRecord, AttractionRecord, DataError, Database, DrivingRecord, FlightRecord,
    RestaurantRecord, Tables,
};
use crate::num::{format_rational, parse_clock, parse_hours_text, parse_rational};
use crate::vocab::HouseRule;
use crate::Rational;

pub const TABLE_FILES: [&str; 6] =
    ["cities.csv", "flights.csv", "driving.csv", "restaurants.csv", "attractions.csv", "accommodations.csv"];

const CITIES: &[&str] = &["state", "city"];
const FLIGHTS: &[&str] = &["origin", "destination", "date", "price", "dep_time", "arr_time", "airline", "nonstop"];
const DRIVING: &[&str] = &["origin", "destination", "distance_km", "duration_hours"];
const RESTAURANTS: &[&str] = &["city", "name", "avg_cost", "cuisines"];
const ATTRACTIONS: &[&str] = &["city", "name", "categories"];
const ACCOMMODATIONS: &[&str] =
    &["city", "name", "price", "room_type", "house_rules", "min_nights", "max_occupancy"];

struct Row<'a> {
    file: &'a str,
    row: usize,
    cols: &'a HashMap<String, usize>,
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn raw(&self, column: &str) -> &str {
        self.record.get(self.cols[column]).unwrap_or("").trim()
    }

    fn err(&self, column: &str, message: impl Into<String>) -> DataError {
        field(self.file, self.row, column, message)
    }

    fn text(&self, column: &str) -> Result<String, DataError> {
        let v = self.raw(column);
        if v.is_empty() {
            Err(self.err(column, "missing value"))
        } else {
            Ok(v.to_string())
        }
    }

    fn optional(&self, column: &str) -> Option<String> {
        let v = self.raw(column);
        (!v.is_empty()).then(|| v.to_string())
    }

    fn number(&self, column: &str) -> Result<Rational, DataError> {
        parse_rational(self.raw(column)).map_err(|m| self.err(column, m))
    }

    fn hour(&self, column: &str) -> Result<Rational, DataError> {
        parse_clock(self.raw(column)).ok_or_else(|| self.err(column, format!("not an hour: {:?}", self.raw(column))))
    }

    fn count(&self, column: &str) -> Result<u32, DataError> {
        self.raw(column).parse().map_err(|_| self.err(column, format!("not a count: {:?}", self.raw(column))))
    }

    fn date(&self, column: &str) -> Result<NaiveDate, DataError> {
        NaiveDate::parse_from_str(self.raw(column), "%Y-%m-%d")
            .map_err(|_| self.err(column, format!("not an ISO date: {:?}", self.raw(column))))
    }

    fn list(&self, column: &str) -> BTreeSet<String> {
        self.raw(column).split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
    }
}

fn read_table<T>(
    root: &Path,
    file: &str,
    columns: &[&str],
    mut parse: impl FnMut(&Row) -> Result<T, DataError>,
) -> Result<Vec<T>, DataError> {
    let path = root.join(file);
    if !path.is_file() {
        return Err(DataError::MissingFile(path));
    }
    let io = |e: csv::Error| DataError::Io { file: file.into(), message: e.to_string() };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(&path).map_err(io)?;
    let headers = reader.headers().map_err(io)?.clone();
    let mut cols = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        let h = h.trim();
        if !columns.contains(&h) {
            return Err(DataError::Io { file: file.into(), message: format!("unexpected column {h:?}") });
        }
        cols.insert(h.to_string(), i);
    }
    if let Some(missing) = columns.iter().find(|c| !cols.contains_key(**c)) {
        return Err(DataError::Io { file: file.into(), message: format!("missing column {missing:?}") });
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(io)?;
        out.push(parse(&Row { file, row: i + 1, cols: &cols, record: &record })?);
    }
    Ok(out)
}

/// Reads the six table files under `root`. Row numbers in errors count data
/// rows from 1, not counting the header.
pub fn load_database(root: impl AsRef<Path>) -> Result<Database, DataError> {
    let root = root.as_ref();
    let cities = read_table(root, "cities.csv", CITIES, |r| Ok((r.text("state")?, r.text("city")?)))?;
    let flights = read_table(root, "flights.csv", FLIGHTS, |r| {
        let nonstop = match r.raw("nonstop").to_ascii_lowercase().as_str() {
            "" => None,
            "true" | "yes" | "1" => Some(true),
            "false" | "no" | "0" => Some(false),
            other => return Err(r.err("nonstop", format!("not a boolean: {other:?}"))),
        };
        Ok(FlightRecord {
            origin: r.text("origin")?,
            destination: r.text("destination")?,
            date: r.date("date")?,
            price: r.number("price")?,
            dep_time: r.hour("dep_time")?,
            arr_time: r.hour("arr_time")?,
            airline: r.optional("airline"),
            nonstop,
        })
    })?;
    let driving = read_table(root, "driving.csv", DRIVING, |r| {
        let raw = r.raw("duration_hours");
        let (duration_hours, duration_text) = match parse_rational(raw) {
            Ok(h) => (h, None),
            Err(_) => match parse_hours_text(raw) {
                Some(h) => (h, Some(raw.to_string())),
                None => return Err(r.err("duration_hours", format!("not a duration: {raw:?}"))),
            },
        };
        Ok(DrivingRecord {
            origin: r.text("origin")?,
            destination: r.text("destination")?,
            distance_km: r.number("distance_km")?,
            duration_hours,
            duration_text,
        })
    })?;
    let restaurants = read_table(root, "restaurants.csv", RESTAURANTS, |r| {
        Ok(RestaurantRecord {
            city: r.text("city")?,
            name: r.text("name")?,
            avg_cost: r.number("avg_cost")?,
            cuisines: r.list("cuisines"),
        })
    })?;
    let attractions = read_table(root, "attractions.csv", ATTRACTIONS, |r| {
        Ok(AttractionRecord { city: r.text("city")?, name: r.text("name")?, categories: r.list("categories") })
    })?;
    let accommodations = read_table(root, "accommodations.csv", ACCOMMODATIONS, |r| {
        let mut house_rules = BTreeSet::new();
        for rule in r.list("house_rules") {
            house_rules.insert(HouseRule::from_prohibition(&rule).map_err(|e| r.err("house_rules", e.to_string()))?);
        }
        Ok(AccommodationRecord {
            city: r.text("city")?,
            name: r.text("name")?,
            price: r.number("price")?,
            room_type: r.raw("room_type").parse().map_err(|e: crate::vocab::UnknownTag| r.err("room_type", e.to_string()))?,
            house_rules,
            min_nights: r.count("min_nights")?,
            max_occupancy: r.count("max_occupancy")?,
        })
    })?;
    Database::new(Tables { cities, flights, driving, restaurants, attractions, accommodations })
}

fn write_table(
    root: &Path,
    file: &str,
    columns: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), DataError> {
    let io = |e: std::io::Error| DataError::Io { file: file.into(), message: e.to_string() };
    let csv_io = |e: csv::Error| DataError::Io { file: file.into(), message: e.to_string() };
    let mut writer = csv::Writer::from_writer(File::create(root.join(file)).map_err(io)?);
    writer.write_record(columns).map_err(csv_io)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_io)?;
    }
    writer.flush().map_err(io)
}

fn joined<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    items.into_iter().map(String::as_str).collect::<Vec<_>>().join(";")
}

/// Writes `db` as the six table files under `root`, creating the directory.
pub fn save_database(db: &Database, root: impl AsRef<Path>) -> Result<(), DataError> {
    let root = root.as_ref();
    std::fs::create_dir_all(root).map_err(|e| DataError::Io { file: root.display().to_string(), message: e.to_string() })?;
    let t = db.tables();
    write_table(root, "cities.csv", CITIES, t.cities.into_iter().map(|(s, c)| vec![s, c]))?;
    write_table(
        root,
        "flights.csv",
        FLIGHTS,
        t.flights.iter().map(|f| {
            vec![
                f.origin.clone(),
                f.destination.clone(),
                f.date.format("%Y-%m-%d").to_string(),
                format_rational(&f.price),
                format_rational(&f.dep_time),
                format_rational(&f.arr_time),
                f.airline.clone().unwrap_or_default(),
                f.nonstop.map(|b| b.to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    write_table(
        root,
        "driving.csv",
        DRIVING,
        t.driving.iter().map(|d| {
            vec![
                d.origin.clone(),
                d.destination.clone(),
                format_rational(&d.distance_km),
                d.duration_text.clone().unwrap_or_else(|| format_rational(&d.duration_hours)),
            ]
        }),
    )?;
    write_table(
        root,
        "restaurants.csv",
        RESTAURANTS,
        t.restaurants
            .iter()
            .map(|r| vec![r.city.clone(), r.name.clone(), format_rational(&r.avg_cost), joined(&r.cuisines)]),
    )?;
    write_table(
        root,
        "attractions.csv",
        ATTRACTIONS,
        t.attractions.iter().map(|a| vec![a.city.clone(), a.name.clone(), joined(&a.categories)]),
    )?;
    write_table(
        root,
        "accommodations.csv",
        ACCOMMODATIONS,
        t.accommodations.iter().map(|a| {
            vec![
                a.city.clone(),
                a.name.clone(),
                format_rational(&a.price),
                a.room_type.as_str().to_string(),
                a.house_rules.iter().map(|h| h.listing_tag()).collect::<Vec<_>>().join(";"),
                a.min_nights.to_string(),
                a.max_occupancy.to_string(),
            ]
        }),
    )?;
    Ok(())
}
