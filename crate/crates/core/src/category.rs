use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Object classes of the evaluation set, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Bike,
    Book,
    Bottle,
    Camera,
    CerealBox,
    Chair,
    Cup,
    Laptop,
    Shoe,
}

impl Category {
    pub const ALL: [Category; 9] = [
        Category::Bike,
        Category::Book,
        Category::Bottle,
        Category::Camera,
        Category::CerealBox,
        Category::Chair,
        Category::Cup,
        Category::Laptop,
        Category::Shoe,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Bike => "bike",
            Category::Book => "book",
            Category::Bottle => "bottle",
            Category::Camera => "camera",
            Category::CerealBox => "cereal_box",
            Category::Chair => "chair",
            Category::Cup => "cup",
            Category::Laptop => "laptop",
            Category::Shoe => "shoe",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}
