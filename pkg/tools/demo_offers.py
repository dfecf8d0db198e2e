"""Hand-written offers for the bundled 60-offer demo catalog (15 per shop)."""

PC = "PC Components"
PER = "PC Peripherals"
EL = "Other Electronics"

# (offer_id, shop_id, name, description, category, price, attributes)
OFFERS = [
    # --- shop1: VoltMart ---------------------------------------------------
    ("D-001", "shop1", "AMD Ryzen 9 5900X Desktop Processor 12 Cores 24 Threads",
     "The AMD Ryzen 9 5900X brings 12 Zen 3 cores and 24 threads to the AM4 platform with boost clocks up to 4.8 GHz "
     "and 70 MB of combined cache. Unlocked for overclocking. Cooler not included; a dedicated graphics card is required.",
     [PC, "CPUs"], "349.00", {"socket": "AM4", "cores": "12", "brand": "AMD"}),
    ("D-002", "shop1", "AMD Ryzen 7 5800X 8-Core Processor AM4",
     "Eight cores and sixteen threads of Zen 3 performance for gamers and streamers. Boost clock up to 4.7 GHz, "
     "105 W TDP, socket AM4, PCIe 4.0 support.",
     [PC, "CPUs"], "229.00", {"socket": "AM4", "cores": "8", "brand": "AMD"}),
    ("D-003", "shop1", "Samsung 990 PRO 2TB NVMe M.2 SSD PCIe 4.0",
     "Samsung 990 PRO internal solid state drive with 2TB capacity, sequential reads up to 7450 MB/s and writes up to "
     "6900 MB/s. M.2 2280 form factor, ideal for gaming rigs and creative workstations.",
     [PC, "Storage"], "199.00", {"capacity_gb": "2000", "interface": "PCIe 4.0 NVMe", "brand": "Samsung"}),
    ("D-004", "shop1", "Logitech MX Keys Mini Wireless Illuminated Keyboard",
     "Minimalist compact wireless keyboard with smart backlighting, spherically dished keys and Bluetooth pairing for up "
     "to three devices. Small footprint that travels well next to a laptop; USB-C rechargeable.",
     [PER, "Keyboards"], "99.99", {"layout": "compact", "connection": "Bluetooth", "brand": "Logitech"}),
    ("D-005", "shop1", "Razer BlackWidow V4 Mechanical Gaming Keyboard Green Switches",
     "Full-size mechanical gaming keyboard with dedicated macro keys, media dial, magnetic wrist rest and Razer Chroma "
     "RGB. Wired USB connection.",
     [PER, "Keyboards"], "179.00", {"layout": "full-size", "connection": "USB", "brand": "Razer"}),
    ("D-006", "shop1", "Logitech MX Master 3S Performance Wireless Mouse Graphite",
     "Ergonomic wireless mouse with 8K DPI optical sensor, quiet clicks and MagSpeed electromagnetic scrolling. "
     "Works on glass, pairs over Bluetooth or the Logi Bolt receiver.",
     [PER, "Mice"], "89.99", {"dpi": "8000", "connection": "Bluetooth", "brand": "Logitech"}),
    ("D-007", "shop1", "Sony WH-1000XM5 Wireless Noise Cancelling Headphones Black",
     "Industry-leading noise cancellation with eight microphones, 30-hour battery life and crystal clear hands-free "
     "calling. Lightweight over-ear design with soft-fit leather.",
     [EL, "Headphones"], "329.00", {"type": "over-ear", "color": "black", "brand": "Sony"}),
    ("D-008", "shop1", "Microsoft Xbox Series S 512GB Console Robot White",
     "All-digital next-gen gaming in the smallest Xbox ever. 512GB custom NVMe SSD, up to 120 FPS, "
     "1440p output. Robot White finish. Disc drive not included.",
     [EL, "Consoles"], "299.00", {"storage_gb": "512", "color": "white", "brand": "Microsoft"}),
    ("D-009", "shop1", "Corsair Vengeance 32GB (2x16GB) DDR5 6000MHz CL36 Memory Kit",
     "Dual-channel DDR5 memory kit tuned for Intel XMP 3.0 and AMD EXPO. Low-profile aluminium heat spreader "
     "for wide cooler compatibility.",
     [PC, "Memory"], "109.99", {"capacity_gb": "32", "type": "DDR5", "brand": "Corsair"}),
    ("D-010", "shop1", "Dell S2722DGM 27 Inch Curved Gaming Monitor QHD 165Hz",
     "27-inch curved VA panel with 2560x1440 resolution, 165 Hz refresh rate and 1 ms MPRT response. "
     "AMD FreeSync Premium, height-adjustable stand.",
     [PER, "Monitors"], "279.00", {"size_in": "27", "refresh_hz": "165", "brand": "Dell"}),
    ("D-011", "shop1", "Intel Core i7-13700K Desktop Processor 16 Cores",
     "13th Gen Intel Core i7 with 8 performance cores and 8 efficient cores, up to 5.4 GHz. Socket LGA1700, "
     "integrated UHD Graphics 770.",
     [PC, "CPUs"], "389.00", {"socket": "LGA1700", "cores": "16", "brand": "Intel"}),
    ("D-012", "shop1", "Crucial P3 1TB PCIe 3.0 NVMe M.2 Internal SSD",
     "Affordable NVMe storage with read speeds up to 3500 MB/s. Easy upgrade for desktops and laptops with an M.2 slot.",
     [PC, "Storage"], "59.99", {"capacity_gb": "1000", "interface": "PCIe 3.0 NVMe", "brand": "Crucial"}),
    ("D-013", "shop1", "Anker 7-in-1 USB-C Hub with 4K HDMI and 100W Power Delivery",
     "Expand a single USB-C port into HDMI, two USB-A ports, SD and microSD readers, and pass-through charging. "
     "Aluminium housing.",
     [PER, "Adapters"], "39.99", {"ports": "7", "brand": "Anker"}),
    ("D-014", "shop1", "Sony PlayStation 5 Slim Console Disc Edition 1TB",
     "Slimmer PlayStation 5 with 1TB SSD, Ultra HD Blu-ray drive and DualSense wireless controller.",
     [EL, "Consoles"], "499.00", {"storage_gb": "1000", "color": "white", "brand": "Sony"}),
    ("D-015", "shop1", "Corsair RM850x 850W 80 PLUS Gold Fully Modular Power Supply",
     "Quiet, fully modular ATX power supply with 135 mm fan and zero RPM mode. Ten-year warranty.",
     [PC, "Power Supplies"], "149.00", {"watts": "850", "efficiency": "80 PLUS Gold", "brand": "Corsair"}),

    # --- shop2: ByteBazaar ---------------------------------------------------
    ("D-016", "shop2", "Ryzen 9 5900X by AMD - 12C/24T, 3.7GHz base, AM4",
     "AMD's flagship Zen 3 desktop chip for socket AM4 motherboards. 12 cores, 24 threads, up to 4.8 GHz boost, "
     "105 W. Box version without cooler.",
     [PC, "Processors"], "339.99", {"socket": "AM4", "cores": "12", "brand": "AMD"}),
    ("D-017", "shop2", "Samsung 990 PRO 2 TB M.2 NVMe SSD (MZ-V9P2T0BW)",
     "Samsung's fastest PCIe 4.0 drive: up to 7,450 MB/s read. 2 TB capacity, 1,200 TBW endurance, "
     "nickel-coated controller for efficient thermals.",
     [PC, "Drives"], "189.99", {"capacity_gb": "2000", "interface": "PCIe 4.0 NVMe", "brand": "Samsung"}),
    ("D-018", "shop2", "ASUS Dual GeForce RTX 4070 SUPER OC White Edition 12GB GDDR6X",
     "White edition of the ASUS Dual RTX 4070 SUPER with factory overclock. A 2.5-slot GPU with axial-tech fans, "
     "DLSS 3 and ray tracing support.",
     [PC, "Graphics Cards"], "629.00", {"memory_gb": "12", "chipset": "RTX 4070 SUPER", "color": "white", "brand": "ASUS"}),
    ("D-019", "shop2", "MSI GeForce RTX 4060 Ti Ventus 2X Black 8G OC",
     "Compact dual-fan GPU for 1080p high refresh gaming. 8 GB GDDR6, DLSS 3, PCIe 4.0 x8.",
     [PC, "Graphics Cards"], "399.00", {"memory_gb": "8", "chipset": "RTX 4060 Ti", "brand": "MSI"}),
    ("D-020", "shop2", "Keychron K3 Ultra-Slim Wireless Mechanical Keyboard 75%",
     "Low-profile compact 75% layout with Bluetooth 5.1 for Mac and Windows. Perfect companion for a laptop on the go "
     "or in a remote office.",
     [PER, "Keyboards"], "84.99", {"layout": "compact", "connection": "Bluetooth", "brand": "Keychron"}),
    ("D-021", "shop2", "Logitech MX Master 3S Wireless Mouse - Pale Grey",
     "Flagship productivity mouse with 8000 DPI tracking, silent clicks and a hyper-fast scroll wheel.",
     [PER, "Mice"], "92.00", {"dpi": "8000", "connection": "Bluetooth", "brand": "Logitech"}),
    ("D-022", "shop2", "Xbox Series X 1TB Console Carbon Black",
     "The fastest, most powerful Xbox with 4K gaming at up to 120 FPS, 1TB SSD and 4K UHD Blu-ray drive.",
     [EL, "Gaming Consoles"], "479.00", {"storage_gb": "1000", "color": "black", "brand": "Microsoft"}),
    ("D-023", "shop2", "Corsair VENGEANCE DDR5 RAM 32GB Kit 2x16GB 6000MT/s",
     "High-frequency DDR5 for the latest Intel and AMD platforms. Onboard voltage regulation, XMP 3.0 ready.",
     [PC, "RAM"], "104.50", {"capacity_gb": "32", "type": "DDR5", "brand": "Corsair"}),
    ("D-024", "shop2", "Nintendo Switch OLED Model White Joy-Con",
     "Play at home on the TV via the included dock or on the go with a vibrant 7-inch OLED screen. 64 GB internal storage.",
     [EL, "Gaming Consoles"], "349.00", {"screen_in": "7", "storage_gb": "64", "brand": "Nintendo"}),
    ("D-025", "shop2", "MSI MAG B550 Tomahawk ATX Motherboard AM4",
     "ATX board for AMD Ryzen 5000 and 3000 series processors on socket AM4. Dual M.2, 2.5G LAN and a reinforced "
     "PCIe 4.0 x16 slot for your GPU.",
     [PC, "Motherboards"], "159.00", {"socket": "AM4", "chipset": "B550", "brand": "MSI"}),
    ("D-026", "shop2", "AMD Ryzen 5 5600X 6-Core 12-Thread Unlocked Processor",
     "Six Zen 3 cores for AM4 with up to 4.6 GHz boost. Wraith Stealth cooler included.",
     [PC, "Processors"], "139.00", {"socket": "AM4", "cores": "6", "brand": "AMD"}),
    ("D-027", "shop2", "AMD Ryzen 7 7800X3D 8-Core Processor with 3D V-Cache",
     "The gaming champion for socket AM5 with 96 MB L3 cache. Requires DDR5 memory and an AM5 motherboard.",
     [PC, "Processors"], "459.00", {"socket": "AM5", "cores": "8", "brand": "AMD"}),
    ("D-028", "shop2", "Bose QuietComfort 45 Bluetooth Headphones White Smoke",
     "Balanced noise cancelling over-ear headphones with Aware mode and 24 hours of battery life.",
     [EL, "Audio"], "249.00", {"type": "over-ear", "color": "white", "brand": "Bose"}),
    ("D-029", "shop2", "Seagate BarraCuda 4TB Internal Hard Drive 3.5 Inch",
     "Reliable 5400 RPM SATA hard drive for bulk storage of photos, videos and game libraries.",
     [PC, "Drives"], "84.00", {"capacity_gb": "4000", "interface": "SATA", "brand": "Seagate"}),
    ("D-030", "shop2", "be quiet! Pure Rock 2 CPU Cooler 150W TDP",
     "Tower air cooler with four heat pipes and a Pure Wings 2 fan. Supports Intel and AMD sockets including AM4 and AM5.",
     [PC, "Cooling"], "44.90", {"tdp_w": "150", "brand": "be quiet!"}),

    # --- shop3: CircuitCorner ------------------------------------------------
    ("D-031", "shop3", "AMD RYZEN 9 5900X PROCESSOR (100-100000061WOF)",
     "Retail box. 12-core, 24-thread unlocked desktop processor. Max boost 4.8 GHz, L3 cache 64 MB, socket AM4. "
     "Thermal solution not included.",
     ["Components", "Processors"], "359.00", {"socket": "AM4", "cores": "12", "brand": "AMD"}),
    ("D-032", "shop3", "AMD RYZEN 7 5800X 3.8GHZ AM4",
     "8 cores / 16 threads, 105 W. Great for high FPS gaming on AM4 boards with a BIOS update for older chipsets.",
     ["Components", "Processors"], "219.00", {"socket": "AM4", "cores": "8", "brand": "AMD"}),
    ("D-033", "shop3", "ASUS DUAL RTX4070 SUPER OC WHITE 12GB",
     "ASUS Dual GeForce RTX 4070 SUPER OC Edition in white. 12GB GDDR6X, boost clock 2550 MHz, 0dB technology, "
     "dual ball fan bearings.",
     ["Components", "Video Cards"], "619.99", {"memory_gb": "12", "chipset": "RTX 4070 SUPER", "color": "white", "brand": "ASUS"}),
    ("D-034", "shop3", "LOGITECH MX KEYS MINI KEYBOARD ROSE",
     "Compact, wireless and smart. Minimalist layout puts the mouse closer to your hands; connects to laptop, "
     "tablet and phone via Bluetooth Low Energy.",
     ["Peripherals", "Keyboards"], "94.50", {"layout": "compact", "connection": "Bluetooth", "brand": "Logitech"}),
    ("D-035", "shop3", "RAZER BLACKWIDOW V4 GREEN SWITCH US LAYOUT",
     "Full-size RGB mechanical keyboard, 6 dedicated macro keys, multi-function roller, USB passthrough.",
     ["Peripherals", "Keyboards"], "169.99", {"layout": "full-size", "connection": "USB", "brand": "Razer"}),
    ("D-036", "shop3", "XBOX SERIES S 512GB WHITE",
     "Go all digital with Xbox Series S. 512 GB SSD storage, 1440p at up to 120 frames per second, compact white console.",
     ["Entertainment", "Consoles"], "279.99", {"storage_gb": "512", "color": "white", "brand": "Microsoft"}),
    ("D-037", "shop3", "XBOX SERIES X 1TB BLACK",
     "True 4K gaming, 1 TB custom SSD, Quick Resume and a 4K UHD Blu-ray drive.",
     ["Entertainment", "Consoles"], "469.00", {"storage_gb": "1000", "color": "black", "brand": "Microsoft"}),
    ("D-038", "shop3", "KINGSTON FURY BEAST 32GB (2X16GB) DDR5 5600MT/S CL40",
     "Plug and play DDR5 kit with Intel XMP 3.0 and AMD EXPO profiles. Black heat spreader.",
     ["Components", "Memory"], "98.90", {"capacity_gb": "32", "type": "DDR5", "brand": "Kingston"}),
    ("D-039", "shop3", "NINTENDO SWITCH OLED NEON RED/BLUE",
     "Hybrid console: dock it to the TV, play in tabletop mode or handheld. 7-inch OLED screen and wide adjustable stand.",
     ["Entertainment", "Consoles"], "339.00", {"screen_in": "7", "storage_gb": "64", "brand": "Nintendo"}),
    ("D-040", "shop3", "MSI MAG B550 TOMAHAWK",
     "Socket AM4 ATX motherboard, 4x DDR4 slots, two M.2 slots, HDMI and DisplayPort outputs.",
     ["Components", "Motherboards"], "154.00", {"socket": "AM4", "chipset": "B550", "brand": "MSI"}),
    ("D-041", "shop3", "INTEL CORE I7-13700K 3.4GHZ LGA1700",
     "Raptor Lake desktop processor, 16 cores (8P+8E), 24 threads, unlocked. Box without cooler.",
     ["Components", "Processors"], "379.00", {"socket": "LGA1700", "cores": "16", "brand": "Intel"}),
    ("D-042", "shop3", "CRUCIAL P3 1TB M.2 NVME",
     "3D NAND NVMe SSD, up to 3500 MB/s sequential read, five-year limited warranty.",
     ["Components", "Storage"], "57.49", {"capacity_gb": "1000", "interface": "PCIe 3.0 NVMe", "brand": "Crucial"}),
    ("D-043", "shop3", "BOSE QUIETCOMFORT 45 BLACK",
     "Wireless noise cancelling headphones with quiet and aware modes, USB-C charging and 24-hour battery.",
     ["Entertainment", "Audio"], "259.00", {"type": "over-ear", "color": "black", "brand": "Bose"}),
    ("D-044", "shop3", "CORSAIR RM850X 850W GOLD MODULAR PSU",
     "ATX 3.0 ready, 80 PLUS Gold efficiency, fully modular cabling, magnetic levitation fan.",
     ["Components", "Power"], "139.99", {"watts": "850", "efficiency": "80 PLUS Gold", "brand": "Corsair"}),
    ("D-045", "shop3", "BE QUIET! PURE ROCK 2 SILVER",
     "Silent tower CPU cooler with brushed aluminium top cover, 150 W cooling capacity.",
     ["Components", "Cooling"], "42.00", {"tdp_w": "150", "brand": "be quiet!"}),

    # --- shop4: PixelPoint ---------------------------------------------------
    ("D-046", "shop4", "AMD Ryzen™ 9 5900X 12-Core Desktop CPU",
     "Zen 3 architecture, 12 cores and 24 threads, 4.8 GHz max boost, socket AM4. Ideal for gaming and content creation. "
     "No graphics and no cooler included.",
     [PC, "CPU"], "329.90", {"socket": "AM4", "cores": "12", "brand": "AMD"}),
    ("D-047", "shop4", "Samsung SSD 990 PRO NVMe M.2 2TB",
     "PCIe 4.0 NVMe SSD with up to 7450 MB/s reads. Samsung Magician software for firmware updates and monitoring.",
     [PC, "SSD"], "209.00", {"capacity_gb": "2000", "interface": "PCIe 4.0 NVMe", "brand": "Samsung"}),
    ("D-048", "shop4", "MSI RTX 4060 Ti VENTUS 2X 8G OC Graphics Card",
     "GeForce RTX 4060 Ti with dual TORX 4.0 fans, 8GB GDDR6 memory, HDMI 2.1a and three DisplayPort outputs.",
     [PC, "Graphics Cards"], "389.00", {"memory_gb": "8", "chipset": "RTX 4060 Ti", "brand": "MSI"}),
    ("D-049", "shop4", "Logitech MX Keys Mini Minimalist Keyboard Pale Grey",
     "Slim compact wireless keyboard for remote work with a laptop: type on up to three devices, backlit keys, "
     "USB-C charging, 10 days of battery.",
     [PER, "Keyboards & Mice"], "102.00", {"layout": "compact", "connection": "Bluetooth", "brand": "Logitech"}),
    ("D-050", "shop4", "Logitech MX Master 3S Mouse Black",
     "Precision wireless mouse with 8K DPI sensor, quiet clicks and customizable buttons via Logi Options+.",
     [PER, "Keyboards & Mice"], "85.00", {"dpi": "8000", "connection": "Bluetooth", "brand": "Logitech"}),
    ("D-051", "shop4", "Sony WH-1000XM5 Noise Cancelling Headphones Silver",
     "Premium over-ear noise cancelling headphones with Auto NC Optimizer, 30 hours of playback and quick charging.",
     [EL, "Headphones"], "309.00", {"type": "over-ear", "color": "silver", "brand": "Sony"}),
    ("D-052", "shop4", "Xbox Series S Console 512GB White",
     "Digital-only Xbox Series S in white with 512GB SSD and Xbox Wireless Controller.",
     [EL, "Video Games"], "289.00", {"storage_gb": "512", "color": "white", "brand": "Microsoft"}),
    ("D-053", "shop4", "Corsair Vengeance DDR5 32GB (2x16GB) 6000MHz Black",
     "32GB dual-module DDR5 kit, CL36, optimized for Intel and AMD. Compact heat spreader.",
     [PC, "Memory"], "112.00", {"capacity_gb": "32", "type": "DDR5", "brand": "Corsair"}),
    ("D-054", "shop4", "Nintendo Switch – OLED Model",
     "Handheld and TV gaming console with dock, 7-inch OLED screen, enhanced audio and a wired LAN port on the dock.",
     [EL, "Video Games"], "344.99", {"screen_in": "7", "storage_gb": "64", "brand": "Nintendo"}),
    ("D-055", "shop4", "Dell 27 Curved Gaming Monitor S2722DGM",
     "QHD 2560x1440 curved gaming monitor, 165 Hz, FreeSync Premium and 1800R curvature.",
     [PER, "Monitors"], "269.00", {"size_in": "27", "refresh_hz": "165", "brand": "Dell"}),
    ("D-056", "shop4", "AMD Ryzen 5 5600X Processor AM4 with Wraith Stealth",
     "6 cores, 12 threads, up to 4.6 GHz. Affordable Zen 3 chip for AM4 motherboards.",
     [PC, "CPU"], "134.90", {"socket": "AM4", "cores": "6", "brand": "AMD"}),
    ("D-057", "shop4", "AMD Ryzen 7 7800X3D Gaming Processor AM5",
     "8 cores with AMD 3D V-Cache technology for top gaming performance on socket AM5.",
     [PC, "CPU"], "449.00", {"socket": "AM5", "cores": "8", "brand": "AMD"}),
    ("D-058", "shop4", "Anker USB-C Hub 7-in-1 HDMI SD Card Reader",
     "Portable hub with 4K HDMI, 100W power delivery pass-through, two USB 3.0 ports and SD/microSD slots.",
     [PER, "Accessories"], "35.99", {"ports": "7", "brand": "Anker"}),
    ("D-059", "shop4", "PlayStation 5 Slim Disc Console 1TB",
     "PS5 Slim with disc drive, 1TB storage and DualSense controller. Smaller and lighter than the original.",
     [EL, "Video Games"], "489.00", {"storage_gb": "1000", "color": "white", "brand": "Sony"}),
    ("D-060", "shop4", "Logitech G PRO X SUPERLIGHT Wireless Gaming Mouse",
     "Under 63 grams, HERO 25K sensor, LIGHTSPEED wireless and up to 70 hours of battery.",
     [PER, "Keyboards & Mice"], "149.00", {"dpi": "25600", "connection": "LIGHTSPEED", "brand": "Logitech"}),
]
