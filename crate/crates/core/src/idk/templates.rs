//! Story schemas and attribute lexicons.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Colors,
    Cities,
    DogBreeds,
    Companies,
    Instruments,
    Fruits,
    Sports,
    Months,
    Professions,
    CarBrands,
    Drinks,
    Languages,
    Countries,
    Flowers,
    PetNames,
    Weekdays,
    Desserts,
    Streets,
    Genres,
    Ages,
    /// Full names; distractors echo brand words from the story.
    EchoNames,
}

impl Category {
    pub fn values(self) -> &'static [&'static str] {
        match self {
            Category::Colors => &[
                "red", "blue", "green", "yellow", "purple", "orange", "brown", "black", "white",
                "gray", "pink", "silver",
            ],
            Category::Cities => &[
                "Fresno",
                "Berkeley",
                "Sacramento",
                "Denver",
                "Portland",
                "Austin",
                "Boston",
                "Chicago",
                "Seattle",
                "Phoenix",
                "Atlanta",
                "Omaha",
            ],
            Category::DogBreeds => &[
                "beagle",
                "poodle",
                "labrador",
                "dachshund",
                "bulldog",
                "collie",
                "terrier",
                "greyhound",
                "husky",
                "corgi",
            ],
            Category::Companies => &[
                "Google",
                "Meta",
                "Apple",
                "Amazon",
                "Netflix",
                "Microsoft",
                "Intel",
                "Adobe",
                "Nvidia",
                "Salesforce",
            ],
            Category::Instruments => &[
                "violin",
                "cello",
                "trumpet",
                "flute",
                "piano",
                "guitar",
                "clarinet",
                "harp",
                "drums",
                "saxophone",
            ],
            Category::Fruits => &[
                "apples", "pears", "plums", "cherries", "peaches", "mangoes", "grapes", "apricots",
                "oranges", "kiwis",
            ],
            Category::Sports => &[
                "tennis",
                "soccer",
                "rugby",
                "hockey",
                "baseball",
                "volleyball",
                "cricket",
                "golf",
                "badminton",
                "lacrosse",
            ],
            Category::Months => &[
                "January",
                "February",
                "March",
                "April",
                "May",
                "June",
                "July",
                "August",
                "September",
                "October",
                "November",
                "December",
            ],
            Category::Professions => &[
                "teacher",
                "nurse",
                "carpenter",
                "pilot",
                "chef",
                "lawyer",
                "plumber",
                "architect",
                "dentist",
                "librarian",
            ],
            Category::CarBrands => &[
                "Toyota", "Honda", "Ford", "Subaru", "Volvo", "Mazda", "Hyundai", "Kia", "Tesla",
                "Nissan",
            ],
            Category::Drinks => &[
                "lemonade",
                "cappuccino",
                "iced tea",
                "cider",
                "hot chocolate",
                "ginger ale",
                "root beer",
                "milkshake",
                "smoothie",
                "cola",
            ],
            Category::Languages => &[
                "Spanish",
                "French",
                "German",
                "Italian",
                "Japanese",
                "Portuguese",
                "Korean",
                "Dutch",
                "Swedish",
                "Greek",
            ],
            Category::Countries => &[
                "Portugal", "Canada", "Kenya", "Norway", "Peru", "Vietnam", "Morocco", "Chile",
                "Ireland", "Egypt",
            ],
            Category::Flowers => &[
                "tulips",
                "roses",
                "daisies",
                "lilies",
                "orchids",
                "sunflowers",
                "peonies",
                "irises",
                "carnations",
                "marigolds",
            ],
            Category::PetNames => &[
                "Max", "Bella", "Charlie", "Luna", "Rocky", "Daisy", "Buddy", "Coco", "Milo",
                "Ruby",
            ],
            Category::Weekdays => &[
                "Monday",
                "Tuesday",
                "Wednesday",
                "Thursday",
                "Friday",
                "Saturday",
                "Sunday",
            ],
            Category::Desserts => &[
                "cheesecake",
                "tiramisu",
                "brownie",
                "apple pie",
                "cupcake",
                "pudding",
                "gelato",
                "eclair",
                "macaron",
                "baklava",
            ],
            Category::Streets => &[
                "Maple Street",
                "Oak Avenue",
                "Pine Road",
                "Elm Street",
                "Cedar Lane",
                "Birch Drive",
                "Willow Way",
                "Chestnut Court",
                "Spruce Street",
                "Aspen Road",
            ],
            Category::Genres => &[
                "mystery",
                "romance",
                "fantasy",
                "biography",
                "thriller",
                "poetry",
                "science fiction",
                "history",
                "western",
                "horror",
            ],
            Category::Ages => &[
                "2 years old",
                "3 years old",
                "4 years old",
                "5 years old",
                "6 years old",
                "7 years old",
                "8 years old",
                "9 years old",
                "10 years old",
                "11 years old",
                "12 years old",
            ],
            Category::EchoNames => &[
                "John Field",
                "Mary Harper",
                "Bob Lane",
                "Linda Moore",
                "Steve Brooks",
                "Karen Carter",
                "Tom Hayes",
                "Lucy Wells",
                "Frank Price",
                "Jim Reed",
            ],
        }
    }
}

pub const ECHO_FIRST: &[&str] = &[
    "John", "Jim", "Bob", "Mary", "Linda", "Steve", "Karen", "Tom", "Lucy", "Frank",
];
pub const BRANDS: &[&str] = &[
    "Stetson", "Oakley", "Levi", "Rolex", "Gucci", "Prada", "Timex", "Fossil",
];

pub const ENTITY_NAMES: &[&str] = &[
    "Anna", "Ben", "Carla", "David", "Emma", "Felix", "Grace", "Henry", "Irene", "Jack", "Kira",
    "Leon", "Mia", "Noah", "Olga", "Paul", "Ruth", "Sam", "Tina", "Victor",
];

#[derive(Debug)]
pub struct StoryTemplate {
    pub id: &'static str,
    pub setup: &'static [&'static str],
    pub fact: &'static str,
    pub question: &'static str,
    pub category: Category,
}

const fn st(
    id: &'static str,
    setup: &'static [&'static str],
    fact: &'static str,
    question: &'static str,
    category: Category,
) -> StoryTemplate {
    StoryTemplate {
        id,
        setup,
        fact,
        question,
        category,
    }
}

pub const TEMPLATES: &[StoryTemplate] = &[
    st(
        "park_outing",
        &[
            "A group of people are gathered around a table at a park.",
            "{name} brought a basket of sandwiches and {name2} brought {num} bottles of water.",
            "They talk about the weather and plan a short walk after lunch.",
        ],
        "The park is located in {value}.",
        "What city is the park located in?",
        Category::Cities,
    ),
    st(
        "dog_walk",
        &[
            "A woman is walking her dog along the river.",
            "The dog is {num} years old and pulls hard on the leash.",
            "{name} waves at them from a bench.",
        ],
        "The dog's fur is {value}.",
        "What is the color of the woman's dog?",
        Category::Colors,
    ),
    st(
        "job_search",
        &[
            "I am searching for jobs in the computer technology industry.",
            "I updated my resume and asked {name} to review it.",
            "Over {num} days I sent out several applications.",
        ],
        "I applied to {value} last week.",
        "Which company did I apply to last week?",
        Category::Companies,
    ),
    st(
        "street_friend",
        &[
            "A man is walking down the street when he sees a friend.",
            "The friend is wearing a {brand} hat and {brand2} sunglasses.",
            "They stop to chat for {num} minutes before parting.",
        ],
        "The friend's name is {value}.",
        "What is the friend's name?",
        Category::EchoNames,
    ),
    st(
        "family_trip",
        &[
            "{name} and the family are packing for a long trip.",
            "They bought {num} new suitcases and a travel guide.",
            "{name2} is in charge of the tickets.",
        ],
        "They are flying to {value}.",
        "Which country is the family traveling to?",
        Category::Countries,
    ),
    st(
        "music_lesson",
        &[
            "{name} has a music lesson every Thursday afternoon.",
            "The teacher, {name2}, has been teaching for {num} years.",
            "After each lesson they drink tea and talk about concerts.",
        ],
        "{name} is learning to play the {value}.",
        "Which instrument is {name} learning to play?",
        Category::Instruments,
    ),
    st(
        "orchard",
        &[
            "{name} owns a small orchard outside of town.",
            "Every autumn {num} workers help with the harvest.",
            "A neighbor, {name2}, sells honey at the same market.",
        ],
        "The orchard is famous for its {value}.",
        "What fruit is the orchard famous for?",
        Category::Fruits,
    ),
    st(
        "sports_club",
        &[
            "{name} joined a club at the community center.",
            "The club meets {num} times a month in the evening.",
            "{name2} organizes the schedule and the snacks.",
        ],
        "The club plays {value}.",
        "Which sport does the club play?",
        Category::Sports,
    ),
    st(
        "birthday",
        &[
            "{name} is planning a surprise party for {name2}.",
            "The guest list has {num} friends and a large cake is ordered.",
            "The party will be held in the backyard.",
        ],
        "{name2}'s birthday is in {value}.",
        "In which month is {name2}'s birthday?",
        Category::Months,
    ),
    st(
        "new_neighbor",
        &[
            "A new neighbor named {name} moved into the house across the street.",
            "{name} has {num} cats and a small vegetable garden.",
            "{name2} brought over a plate of cookies to say hello.",
        ],
        "{name} works as a {value}.",
        "What is {name}'s profession?",
        Category::Professions,
    ),
    st(
        "road_trip",
        &[
            "{name} and {name2} are driving across the state.",
            "They plan to stop {num} times for food and gas.",
            "The radio only plays old songs, which {name2} loves.",
        ],
        "They are driving a {value}.",
        "What brand of car are they driving?",
        Category::CarBrands,
    ),
    st(
        "cafe",
        &[
            "{name} sits at a corner table in a quiet cafe.",
            "The novel on the table was a gift from {name2}.",
            "The waiter has walked past the table {num} times.",
        ],
        "{name} ordered a {value}.",
        "What drink did {name} order?",
        Category::Drinks,
    ),
    st(
        "language_class",
        &[
            "{name} signed up for an evening class at the library.",
            "The class has {num} students and meets twice a week.",
            "The instructor, {name2}, gives a short quiz every Friday.",
        ],
        "The class teaches {value}.",
        "Which language does the class teach?",
        Category::Languages,
    ),
    st(
        "garden",
        &[
            "{name} spends every weekend in the garden.",
            "There are {num} raised beds built from old wooden planks.",
            "A friend, {name2}, helps water the plants.",
        ],
        "This year {name} planted {value}.",
        "Which flowers did {name} plant this year?",
        Category::Flowers,
    ),
    st(
        "pet_adoption",
        &[
            "{name} adopted a puppy from the animal shelter.",
            "The puppy is {num} months old and loves to chew shoes.",
            "{name2} helped pick out a collar and a bed.",
        ],
        "The puppy's name is {value}.",
        "What is the puppy's name?",
        Category::PetNames,
    ),
    st(
        "office_meeting",
        &[
            "The team at the office scheduled an important meeting.",
            "{name} prepared {num} slides for the presentation.",
            "{name2} booked the large conference room.",
        ],
        "The meeting is on {value}.",
        "On which day is the meeting?",
        Category::Weekdays,
    ),
    st(
        "bakery",
        &[
            "{name} opened a small bakery on the main street.",
            "On the first day, {num} customers lined up before sunrise.",
            "{name2} helped decorate the windows.",
        ],
        "The bakery's best seller is the {value}.",
        "What is the bakery's best seller?",
        Category::Desserts,
    ),
    st(
        "moving_day",
        &[
            "{name} is moving into a new apartment.",
            "The rented truck holds {num} boxes and a sofa.",
            "{name2} promised to help carry the heavy furniture.",
        ],
        "The apartment is on {value}.",
        "On which street is the new apartment?",
        Category::Streets,
    ),
    st(
        "book_club",
        &[
            "{name} hosts a book club once a month.",
            "This month {num} members showed up with snacks.",
            "{name2} always arrives late but brings the best questions.",
        ],
        "The club is reading a {value} novel.",
        "What genre of novel is the club reading?",
        Category::Genres,
    ),
    st(
        "grandfather",
        &[
            "{name} visits a grandfather every Sunday.",
            "He tells stories about the {num} winters he spent at sea.",
            "A cousin, {name2}, sometimes joins them for lunch.",
        ],
        "The grandfather's cat is {value}.",
        "How old is the grandfather's cat?",
        Category::Ages,
    ),
    st(
        "dog_photo",
        &[
            "A family is looking at a photo of their new dog.",
            "The photo was taken by {name} on a trip {num} weeks ago.",
            "{name2} wants to frame it for the hallway.",
        ],
        "The dog is a {value}.",
        "What breed is the family's dog?",
        Category::DogBreeds,
    ),
];
